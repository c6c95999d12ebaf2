import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import freeconvex.sdp as S
from freeconvex.algebra import realify
from freeconvex.rand import rng, rand_hermitian, rand_unitary
from freeconvex.sdp import (HermitianProblem, ProblemBuilder, SolveStatus,
                            build_from_complex, solve, svec, smat, symkron,
                            svec_dim)


def entry_rows(builder, name, target, n, t=None):
    """Pin block `name` entrywise to target (- t*I when t is given)."""
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = 0.5
            free = {t: 1.0} if (t is not None and i == j) else {}
            builder.add_row({name: e}, free, target[i, j])


@settings(deadline=None, max_examples=30)
@given(st.integers(1, 7), st.integers(0, 10_000))
def test_svec_symkron_identities(n, seed):
    gen = rng(seed)
    s = gen.standard_normal((n, n))
    s = s + s.T
    t = gen.standard_normal((n, n))
    t = t + t.T
    assert np.allclose(smat(svec(s), n), s)
    assert abs(svec(s) @ svec(t) - np.tensordot(s, t)) < 1e-9
    w = gen.standard_normal((n, n))
    w = w @ w.T + np.eye(n)
    assert np.allclose(symkron(w) @ svec(s), svec(w @ s @ w), atol=1e-8)


def test_identity_slack():
    b = ProblemBuilder()
    b.add_block("Z", 2)
    t = b.add_free(1)[0]
    entry_rows(b, "Z", np.eye(2), 2, t)
    b.set_objective({}, {t: 1.0})
    sol = solve(b.build())
    assert sol.status is SolveStatus.FEASIBLE
    assert abs(sol.objective_value - 1.0) < 1e-6


def test_diagonal_slack_matches_min_eig():
    b = ProblemBuilder()
    b.add_block("Z", 2)
    t = b.add_free(1)[0]
    entry_rows(b, "Z", np.diag([1.0, 2.0]), 2, t)
    b.set_objective({}, {t: 1.0})
    sol = solve(b.build())
    assert abs(sol.objective_value - 1.0) < 1e-6


def test_trace_pair_infeasible():
    b = ProblemBuilder()
    b.add_block("Z", 2)
    b.add_row({"Z": np.eye(2)}, {}, 1.0)
    b.add_row({"Z": np.diag([1.0, -1.0])}, {}, 2.0)
    sol = solve(b.build())
    assert sol.status is SolveStatus.INFEASIBLE
    assert abs(sol.margin + 0.5) < 1e-6


def test_boundary_rescue():
    b = ProblemBuilder()
    b.add_block("Z", 2)
    b.add_row({"Z": np.eye(2)}, {}, 0.0)
    sol = solve(b.build())
    assert sol.status is SolveStatus.FEASIBLE
    assert np.abs(sol.witness["Z"]).max() < 1e-7


def test_inconsistent_equalities():
    b = ProblemBuilder()
    b.add_block("Z", 1)
    b.add_row({"Z": np.eye(1)}, {}, 1.0)
    b.add_row({"Z": 2 * np.eye(1)}, {}, 1.0)
    sol = solve(b.build())
    assert sol.status is SolveStatus.INFEASIBLE
    assert sol.margin == -np.inf


def test_unbounded_margin_yields_verified_witness():
    b = ProblemBuilder()
    b.add_block("Z", 2)
    b.add_row({"Z": np.diag([1.0, -1.0])}, {}, 0.0)
    sol = solve(b.build())
    assert sol.status is SolveStatus.FEASIBLE
    assert sol.margin == np.inf
    assert np.linalg.eigvalsh(sol.witness["Z"])[0] > 0


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 10_000))
def test_strictly_feasible_problems_solve(seed):
    gen = rng(seed)
    n = int(gen.integers(2, 6))
    m = int(gen.integers(1, n + 2))
    zstar = gen.standard_normal((n, n))
    zstar = zstar @ zstar.T + 0.5 * np.eye(n)
    b = ProblemBuilder()
    b.add_block("Z", n)
    for _ in range(m):
        f = gen.standard_normal((n, n))
        f = f + f.T
        b.add_row({"Z": f}, {}, float(np.tensordot(f, zstar)))
    sol = solve(b.build())
    assert sol.status is SolveStatus.FEASIBLE
    # independent witness verification at the documented tolerances
    assert sol.info["eq_resid"] <= 1e-6
    assert sol.info["eig_min"] >= -1e-6


def _status_of(rows, rhs, n):
    b = ProblemBuilder()
    b.add_block("Z", n)
    for f, c in zip(rows, rhs):
        b.add_row({"Z": f}, {}, c)
    return solve(b.build()).status


def test_row_scaling_invariance():
    gen = rng(42)
    n = 3
    zstar = rand_hermitian(gen, n, real=True).real
    zstar = zstar @ zstar + 0.3 * np.eye(n)
    rows = []
    for _ in range(3):
        f = gen.standard_normal((n, n))
        rows.append(f + f.T)
    rhs = [float(np.tensordot(f, zstar))for f in rows]
    base = _status_of(rows, rhs, n)
    for scales in ([0.1, 1.0, 10.0], [5.0, 0.2, 1.0]):
        scaled = [s * f for s, f in zip(scales, rows)]
        srhs = [s * c for s, c in zip(scales, rhs)]
        assert _status_of(scaled, srhs, n) is base
    # and for an infeasible system
    rows = [np.eye(2), np.diag([1.0, -1.0])]
    rhs = [1.0, 2.0]
    base = _status_of(rows, rhs, 2)
    assert base is SolveStatus.INFEASIBLE
    for scales in ([0.1, 10.0], [10.0, 0.1]):
        scaled = [s * f for s, f in zip(scales, rows)]
        srhs = [s * c for s, c in zip(scales, rhs)]
        assert _status_of(scaled, srhs, 2) is base


def test_orthogonal_conjugation_invariance():
    gen = rng(5)
    n = 3
    q = rand_unitary(gen, n, real=True).real
    for expect_feasible in (True, False):
        rows = []
        if expect_feasible:
            zstar = rand_hermitian(gen, n, real=True).real
            zstar = zstar @ zstar + 0.2 * np.eye(n)
            for _ in range(3):
                f = gen.standard_normal((n, n))
                f = f + f.T
                rows.append((f, float(np.tensordot(f, zstar))))
        else:
            rows = [(np.eye(n), -1.0)]
        base = _status_of([f for f, _ in rows], [c for _, c in rows], n)
        conj = _status_of([q.T @ f @ q for f, _ in rows],
                          [c for _, c in rows], n)
        assert conj is base


def test_build_from_complex_doubles_real_data():
    hp = HermitianProblem()
    hp.add_block("Z", 2)
    hp.add_scalar_row({"Z": np.eye(2)}, {}, 1.0)
    p = build_from_complex(hp)
    assert p.blocks == (("Z", 4),)
    # the smart path keeps the real size
    p2, dec = hp.build()
    assert p2.blocks == (("Z", 2),) and dec.real_path
    # and both decide the same feasibility with the same margin
    a = S.solve(p)
    b = S.solve(p2)
    assert a.status is b.status
    assert abs(a.margin - b.margin) < 1e-6


def test_complex_cross_check_with_direct_formulation():
    # genuinely complex data: forced realification agrees with the smart path
    sy = np.array([[0, -1j], [1j, 0]])
    for val, expect in ((0.5, SolveStatus.FEASIBLE),
                        (1.5, SolveStatus.INFEASIBLE)):
        hp = HermitianProblem()
        hp.add_block("C", 2)
        hp.add_scalar_row({"C": np.eye(2)}, {}, 1.0)
        hp.add_scalar_row({"C": sy}, {}, val)
        problem, dec = hp.build()
        assert not dec.real_path
        forced = build_from_complex(hp)
        a = S.solve(problem)
        b = S.solve(forced)
        assert a.status is b.status is expect
        assert abs(a.margin - b.margin) < 1e-6


def test_complex_scalar_block():
    hp = HermitianProblem()
    hp.add_block("z", 1)
    hp.add_scalar_row({"z": np.eye(1)}, {}, 1.0)
    sol = hp.solve()
    assert sol.feasible
    assert abs(sol.block("z")[0, 0] - 1.0) < 1e-7


def test_feasible_witness_contract():
    # every FEASIBLE answer satisfies the documented witness invariants,
    # re-checked here outside the solver
    gen = rng(17)
    for _ in range(10):
        n = int(gen.integers(2, 5))
        zstar = gen.standard_normal((n, n))
        zstar = zstar @ zstar.T + 0.1 * np.eye(n)
        b = ProblemBuilder()
        b.add_block("Z", n)
        for _ in range(int(gen.integers(1, n))):
            f = gen.standard_normal((n, n))
            f = f + f.T
            b.add_row({"Z": f}, {}, float(np.tensordot(f, zstar)))
        problem = b.build()
        sol = solve(problem)
        assert sol.status is SolveStatus.FEASIBLE
        z = sol.witness["Z"]
        resid = np.abs(problem.A_blocks[0] @ svec(z) - problem.rhs).max()
        assert resid <= 1e-6
        assert np.linalg.eigvalsh(z)[0] >= -1e-6
