"""Self-contained dense semidefinite feasibility/optimization engine.

Real symmetric PSD blocks plus free scalar variables, affine equality
constraints, and a linear objective.  The core is a homogeneous self-dual
interior-point method with Nesterov-Todd scaling and a Mehrotra
predictor-corrector, so primal/dual infeasibility and unbounded objectives
are detected through certificates instead of big-M constructions.  Every
FEASIBLE answer is re-verified by an independent eigenvalue/residual check
before it is returned.

Feasibility questions are decided through a phase-I problem

    maximize t  subject to  Z_b - t I >= 0 for every block, equalities,

whose optimal value t* is the reported margin: FEASIBLE above +feas_tol,
INFEASIBLE below -feas_tol, and inside the band only a verified boundary
witness may promote the answer to FEASIBLE (otherwise MARGINAL).  An
optional trace cap ``sum_b tr Z_b <= trace_cap`` can be requested for
callers that want a compact phase-I search region; the self-dual embedding
does not need it, so it is off by default.

Complex Hermitian problems enter through :class:`HermitianProblem`, which
realifies blocks via [[Re, -Im], [Im, Re]] and maps witnesses back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .algebra import derealify, hermitian_part, realify

__all__ = [
    "SolveStatus",
    "SDPProblem",
    "SDPSolution",
    "ProblemBuilder",
    "solve",
    "solve_feasibility",
    "HermitianProblem",
    "build_from_complex",
    "FEAS_TOL",
]

FEAS_TOL = 1e-7          # width of the MARGINAL band around t* = 0
_WITNESS_EQ_TOL = 1e-7   # FEASIBLE witnesses must satisfy equalities to this
_WITNESS_EIG_TOL = 1e-8  # ... and have lambda_min >= -this


class SolveStatus(Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    MARGINAL = "MARGINAL"
    ERROR = "ERROR"


# ---------------------------------------------------------------------------
# svec utilities (sqrt-2 scaled upper triangle, so <S,T> = svec(S).svec(T))
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)
_svec_cache: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _svec_idx(n: int):
    if n not in _svec_cache:
        iu, ju = np.triu_indices(n)
        w = np.where(iu == ju, 1.0, _SQRT2)
        _svec_cache[n] = (iu, ju, w)
    return _svec_cache[n]


def svec(s: np.ndarray) -> np.ndarray:
    n = s.shape[0]
    iu, ju, w = _svec_idx(n)
    return np.asarray(s, dtype=float)[iu, ju] * w


def smat(v: np.ndarray, n: int) -> np.ndarray:
    iu, ju, w = _svec_idx(n)
    out = np.zeros((n, n))
    out[iu, ju] = v / w
    out = out + out.T
    out[np.arange(n), np.arange(n)] *= 0.5
    return out


def svec_dim(n: int) -> int:
    return n * (n + 1) // 2


def symkron(w: np.ndarray) -> np.ndarray:
    """Dense matrix of z -> svec(W smat(z) W) on the svec coordinates."""
    n = w.shape[0]
    iu, ju, sc = _svec_idx(n)
    a = w[np.ix_(iu, iu)] * w[np.ix_(ju, ju)]
    b = w[np.ix_(iu, ju)] * w[np.ix_(ju, iu)]
    # (W_ik W_jl + W_il W_jk) * m_ij * m_kl with m = 1/sqrt2 on the diagonal
    return (a + b) * (np.outer(sc, sc) * 0.5)


# ---------------------------------------------------------------------------
# problem containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SDPProblem:
    """Dense real SDP in primal form.

    blocks: (name, size) PSD variable blocks Z_b.
    n_free: number of unconstrained scalar variables t.
    A_blocks[b]: (m x svec_dim(size_b)) equality coefficients for block b.
    A_free: (m x n_free); rhs: (m,).
    Objective (maximized): sum_b <C_b, Z_b> + d.t, given in svec coordinates.
    """

    blocks: tuple                      # tuple[(name, size)]
    n_free: int
    A_blocks: tuple                    # tuple[np.ndarray], aligned with blocks
    A_free: np.ndarray
    rhs: np.ndarray
    obj_blocks: Optional[tuple] = None
    obj_free: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.rhs.shape[0]

    @property
    def has_objective(self) -> bool:
        return self.obj_blocks is not None or self.obj_free is not None


@dataclass
class SDPSolution:
    status: SolveStatus
    witness: Dict[str, np.ndarray] = field(default_factory=dict)
    free_values: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    margin: Optional[float] = None
    iterations: int = 0
    info: Dict[str, object] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.FEASIBLE


class ProblemBuilder:
    """Incremental assembly of an :class:`SDPProblem`."""

    def __init__(self):
        self._blocks: List[Tuple[str, int]] = []
        self._rows: List[Tuple[Dict[str, np.ndarray], Dict[int, float], float]] = []
        self._n_free = 0
        self._obj: Optional[Tuple[Dict[str, np.ndarray], Dict[int, float]]] = None

    def add_block(self, name: str, size: int) -> str:
        if any(n == name for n, _ in self._blocks):
            raise ValueError(f"duplicate block {name!r}")
        if size < 1:
            raise ValueError("block size must be >= 1")
        self._blocks.append((name, size))
        return name

    def add_free(self, count: int = 1) -> range:
        start = self._n_free
        self._n_free += count
        return range(start, start + count)

    def add_row(self, block_terms: Dict[str, np.ndarray],
                free_terms: Optional[Dict[int, float]], rhs: float):
        """<F_b, Z_b> summed over block_terms plus sum a_i t_i = rhs."""
        self._rows.append((dict(block_terms), dict(free_terms or {}), float(rhs)))

    def set_objective(self, block_terms: Dict[str, np.ndarray],
                      free_terms: Optional[Dict[int, float]] = None):
        self._obj = (dict(block_terms), dict(free_terms or {}))

    def build(self) -> SDPProblem:
        sizes = dict(self._blocks)
        m = len(self._rows)
        A_blocks = [np.zeros((m, svec_dim(sz))) for _, sz in self._blocks]
        A_free = np.zeros((m, self._n_free))
        rhs = np.zeros(m)
        order = {name: k for k, (name, _) in enumerate(self._blocks)}
        for i, (bt, ft, c) in enumerate(self._rows):
            for name, f in bt.items():
                f = np.asarray(f, dtype=float)
                if f.shape != (sizes[name],) * 2:
                    raise ValueError(f"row {i}: data for block {name!r} has wrong shape")
                if np.abs(f - f.T).max() > 1e-12 * max(1.0, np.abs(f).max()):
                    raise ValueError(f"row {i}: data for block {name!r} not symmetric")
                A_blocks[order[name]][i] = svec(0.5 * (f + f.T))
            for j, a in ft.items():
                A_free[i, j] = a
            rhs[i] = c
        obj_blocks = obj_free = None
        if self._obj is not None:
            bt, ft = self._obj
            obj_blocks = tuple(
                svec(np.asarray(bt[name], dtype=float)) if name in bt
                else np.zeros(svec_dim(sz))
                for name, sz in self._blocks)
            obj_free = np.zeros(self._n_free)
            for j, a in ft.items():
                obj_free[j] = a
        return SDPProblem(tuple(self._blocks), self._n_free, tuple(A_blocks),
                          A_free, rhs, obj_blocks, obj_free)


# ---------------------------------------------------------------------------
# presolve: row scaling, rank reduction, consistency
# ---------------------------------------------------------------------------


def _presolve(A: np.ndarray, b: np.ndarray, tol: float = 1e-11):
    """Return (keep_rows, consistent).  Rows are scaled to unit sup-norm
    before rank detection; an inconsistent affine system reports
    consistent=False (no conic point can exist)."""
    m = A.shape[0]
    if m == 0:
        return np.arange(0), True
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0] = 1.0
    As = A / scale[:, None]
    bs = b / scale
    x0, *_ = np.linalg.lstsq(As, bs, rcond=None)
    resid = float(np.abs(As @ x0 - bs).max()) if m else 0.0
    if resid > 1e-8:
        return np.arange(m), False
    q, r, piv = sla.qr(As.T, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(diag > max(tol * diag[0], 1e-13)))
    keep = np.sort(piv[:rank])
    return keep, True


def _scale_rows(A_parts, A_free, b):
    """Divide every equality row (and its rhs) by its sup-norm."""
    m = b.shape[0]
    if m == 0:
        return A_parts, A_free, b
    s = np.abs(b).copy()
    for Ab in A_parts:
        if Ab.shape[1]:
            s = np.maximum(s, np.abs(Ab).max(axis=1))
    if A_free.shape[1]:
        s = np.maximum(s, np.abs(A_free).max(axis=1))
    s[s == 0] = 1.0
    return ([Ab / s[:, None] for Ab in A_parts], A_free / s[:, None], b / s)


# ---------------------------------------------------------------------------
# homogeneous self-dual interior-point core
# ---------------------------------------------------------------------------


class _IPMFailure(Exception):
    pass


def _max_step(z: np.ndarray, dz: np.ndarray, lz: np.ndarray) -> float:
    """sup { a <= 1 : Z + a dZ >= 0 }, via eig of Lz^-1 dZ Lz^-T."""
    m = sla.solve_triangular(lz, dz, lower=True, check_finite=False)
    m = sla.solve_triangular(lz, m.T, lower=True, check_finite=False).T
    lam = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
    if lam >= -1e-13:
        return 1.0
    return min(1.0, -1.0 / lam)


def _nt_scaling(z: np.ndarray, s: np.ndarray):
    """NT scaling point W with W S W = Z, plus Cholesky factors of Z and S."""
    lz = np.linalg.cholesky(z)
    ls = np.linalg.cholesky(s)
    m = lz.T @ s @ lz
    evals, evecs = np.linalg.eigh(0.5 * (m + m.T))
    if evals[0] <= 0:
        raise _IPMFailure("scaling matrix not positive definite")
    w = lz @ (evecs @ ((evals ** -0.5)[:, None] * evecs.T)) @ lz.T
    return 0.5 * (w + w.T), lz, ls


@dataclass
class _HSDResult:
    kind: str                     # "optimal" | "pinfeas" | "unbounded"
    Z: Optional[list] = None
    u: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    pobj: float = math.nan
    iterations: int = 0
    info: dict = field(default_factory=dict)
    ray: Optional[list] = None
    ray_free: Optional[np.ndarray] = None


def _hsd_minimize(sizes: Sequence[int], A_parts: Sequence[np.ndarray],
                  A_free: np.ndarray, b: np.ndarray,
                  c_parts: Sequence[np.ndarray], c_free: np.ndarray,
                  tol: float, max_iter: int,
                  init_scale: float = 1.0) -> _HSDResult:
    """minimize sum <C_b,Z_b> + c_free.u  s.t. equalities, Z_b >= 0, u free,

    via the homogeneous self-dual embedding with NT scaling."""
    nb = len(sizes)
    m = b.shape[0]
    nf = A_free.shape[1]
    if m == 0:
        raise _IPMFailure("problems without equality rows are handled upstream")

    Z = [init_scale * np.eye(n) for n in sizes]
    S = [init_scale * np.eye(n) for n in sizes]
    u = np.zeros(nf)
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    ordn = sum(sizes) + 1

    bnorm = 1.0 + float(np.abs(b).max())
    cnorm = 1.0 + max([0.0] + [float(np.abs(c).max()) for c in c_parts]
                      + ([float(np.abs(c_free).max())] if nf else []))

    def cdot(zs, uu):
        return sum(float(c_parts[k] @ zs[k]) for k in range(nb)) + \
            (float(c_free @ uu) if nf else 0.0)

    best_score = math.inf
    best_snapshot = None
    stall = 0
    ptol = max(tol, 1e-7)
    gtol = max(tol, 1e-9)

    def finish(snapshot, it, loose):
        Zs, us, ys, pobj_, metrics = snapshot
        info = dict(metrics)
        if loose:
            info["loose"] = True
        return _HSDResult("optimal", Zs, us, ys, pobj_, it, info)

    for it in range(1, max_iter + 1):
        # the HSD solution set is a ray: renormalize if the iterate grows
        big = max([float(np.abs(zb).max()) for zb in Z]
                  + [float(np.abs(sb).max()) for sb in S] + [tau, kappa])
        if not math.isfinite(big):
            raise _IPMFailure("iterate diverged")
        if big > 1e8:
            lam = 1.0 / big
            Z = [zb * lam for zb in Z]
            S = [sb * lam for sb in S]
            u, y = u * lam, y * lam
            tau, kappa = tau * lam, kappa * lam
        z_sv = [svec(Z[k]) for k in range(nb)]
        s_sv = [svec(S[k]) for k in range(nb)]
        Ax = sum(A_parts[k] @ z_sv[k] for k in range(nb))
        if nf:
            Ax = Ax + A_free @ u
        rP = Ax - b * tau
        rD = [A_parts[k].T @ y + s_sv[k] - c_parts[k] * tau for k in range(nb)]
        rDf = (A_free.T @ y - c_free * tau) if nf else np.zeros(0)
        cx = cdot(z_sv, u)
        by = float(b @ y)
        rG = cx - by + kappa
        gap = sum(float(z_sv[k] @ s_sv[k]) for k in range(nb)) + tau * kappa
        mu = gap / ordn

        # convergence / certificate tests on the normalized iterate
        pres = float(np.abs(rP).max()) / (tau * bnorm)
        dres = max([float(np.abs(r).max()) for r in rD] + [0.0])
        if nf:
            dres = max(dres, float(np.abs(rDf).max()))
        dres /= (tau * cnorm)
        pobj, dobj = cx / tau, by / tau
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        score = max(pres / ptol, dres / ptol, relgap / gtol)
        improved = score < 0.98 * best_score
        if score < best_score:
            best_score = score
            best_snapshot = ([zb / tau for zb in Z], u / tau, y / tau, pobj,
                             {"pres": pres, "dres": dres, "relgap": relgap})
        if pres <= ptol and dres <= ptol and relgap <= gtol:
            return finish(best_snapshot, it, loose=False)
        # infeasibility certificates (rays are re-verified by the callers)
        def certificates():
            if by > 0:
                hres = max([float(np.abs(A_parts[k].T @ y + s_sv[k]).max())
                            for k in range(nb)] + [0.0])
                if nf:
                    hres = max(hres, float(np.abs(A_free.T @ y).max()))
                if hres <= 1e-6 * by:
                    return _HSDResult("pinfeas", iterations=it,
                                      info={"farkas_resid": hres / by, "by": by})
            if cx < 0:
                uray = float(np.abs(rP + b * tau).max())  # = |A x|
                if uray <= 1e-6 * (-cx):
                    return _HSDResult("unbounded", iterations=it,
                                      ray=[zb / (-cx) for zb in Z],
                                      ray_free=(u / (-cx) if nf else None),
                                      info={"ray_resid": uray / (-cx)})
            return None

        cert = certificates()
        if cert is not None:
            return cert
        if tau <= 1e-12 and kappa <= 1e-12:
            raise _IPMFailure("tau and kappa both collapsed")
        stall = 0 if improved else stall + 1
        window = 8 if best_score <= 100.0 else 25
        if stall > window or mu <= 1e-25:
            if best_score <= 100.0:
                # numerically converged as far as it will go
                return finish(best_snapshot, it, loose=True)
            raise _IPMFailure(
                f"stalled at iteration {it} (mu={mu:.2e}, pres={pres:.2e}, "
                f"dres={dres:.2e}, relgap={relgap:.2e})")

        # NT scaling and Schur complement
        W, Lz, Ls, SK, Sinv = [], [], [], [], []
        for k in range(nb):
            try:
                w, lz, ls = _nt_scaling(Z[k], S[k])
            except np.linalg.LinAlgError:
                raise _IPMFailure("iterate left the cone")
            W.append(w)
            Lz.append(lz)
            Ls.append(ls)
            SK.append(symkron(w))
            si = np.linalg.inv(S[k])
            Sinv.append(0.5 * (si + si.T))
        M = np.zeros((m, m))
        for k in range(nb):
            M += A_parts[k] @ SK[k] @ A_parts[k].T
        M[np.arange(m), np.arange(m)] += 1e-13 * (1.0 + np.trace(M) / m)

        cho = None
        try:
            cho = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            pass
        if cho is None:
            lu = sla.lu_factor(M + 1e-10 * np.eye(m), check_finite=False)
            solveM = lambda v: sla.lu_solve(lu, v, check_finite=False)
        else:
            solveM = lambda v: sla.cho_solve((cho, True), v, check_finite=False)

        if nf:
            MiAf = solveM(A_free)
            small = A_free.T @ MiAf
            small = 0.5 * (small + small.T) + 1e-13 * np.eye(nf)
            small_lu = sla.lu_factor(small, check_finite=False)

        def kkt_once(v1, v2):
            if nf:
                Miv1 = solveM(v1)
                d = sla.lu_solve(small_lu, A_free.T @ Miv1 - v2, check_finite=False)
                a = Miv1 - MiAf @ d
            else:
                a = solveM(v1)
                d = np.zeros(0)
            return a, d

        def kkt(v1, v2):
            """Solve [[M, Af],[Af', 0]] [a; d] = [v1; v2], one refinement."""
            a, d = kkt_once(v1, v2)
            r1 = v1 - M @ a - (A_free @ d if nf else 0.0)
            r2 = (v2 - A_free.T @ a) if nf else np.zeros(0)
            a2, d2 = kkt_once(r1, r2)
            return a + a2, d + d2

        q = sum(A_parts[k] @ (SK[k] @ c_parts[k]) for k in range(nb))
        cSKc = sum(float(c_parts[k] @ (SK[k] @ c_parts[k])) for k in range(nb))
        dy1, du1 = kkt(q + b, c_free if nf else np.zeros(0))

        def direction(rc_parts, rc_tk):
            # dz = rc + SK rD + SK A'dy - SK c dtau, eliminated into the
            # bordered Schur system over (dy, du, dtau)
            r1 = -rP.copy()
            for k in range(nb):
                r1 -= A_parts[k] @ (rc_parts[k] + SK[k] @ rD[k])
            r2 = -rDf if nf else np.zeros(0)
            dy0, du0 = kkt(r1, r2)
            crc = sum(float(c_parts[k] @ rc_parts[k]) for k in range(nb))
            cSKrD = sum(float(c_parts[k] @ (SK[k] @ rD[k])) for k in range(nb))
            r3 = -rG - crc - cSKrD - rc_tk / tau
            qb = q - b
            num = r3 - float(qb @ dy0) - (float(c_free @ du0) if nf else 0.0)
            den = float(qb @ dy1) + (float(c_free @ du1) if nf else 0.0) \
                - (cSKc + kappa / tau)
            if abs(den) < 1e-300:
                raise _IPMFailure("singular bordered system")
            dtau = num / den
            dy = dy0 + dtau * dy1
            du = du0 + dtau * du1 if nf else np.zeros(0)
            dS_, dZ_ = [], []
            for k in range(nb):
                ds = -rD[k] - A_parts[k].T @ dy + c_parts[k] * dtau
                dz = rc_parts[k] - SK[k] @ ds
                dS_.append(smat(ds, sizes[k]))
                dZ_.append(smat(dz, sizes[k]))
            dkappa = (rc_tk - kappa * dtau) / tau
            return dZ_, dS_, dy, du, dtau, dkappa

        def max_alpha(dZ_, dS_, dtau, dkappa):
            a = 1.0
            for k in range(nb):
                a = min(a, _max_step(Z[k], dZ_[k], Lz[k]))
                a = min(a, _max_step(S[k], dS_[k], Ls[k]))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        # predictor
        rc_aff = [svec(-Z[k]) for k in range(nb)]
        dZa, dSa, dya, dua, dta, dka = direction(rc_aff, -tau * kappa)
        a_aff = max_alpha(dZa, dSa, dta, dka)
        sigma = min(1.0, max((1.0 - a_aff) ** 3, 1e-4))

        # corrector
        rc = []
        for k in range(nb):
            corr = dZa[k] @ Sinv[k] @ dSa[k]
            rc.append(svec(sigma * mu * Sinv[k] - Z[k] - 0.5 * (corr + corr.T)))
        rc_tk = sigma * mu - tau * kappa - dta * dka
        dZ, dS, dy, du, dt, dk = direction(rc, rc_tk)
        alpha = 0.98 * max_alpha(dZ, dS, dt, dk)
        if alpha < 0.05:
            sigma = max(sigma, 0.8)
            rc = [svec(sigma * mu * Sinv[k] - Z[k]) for k in range(nb)]
            dZ, dS, dy, du, dt, dk = direction(rc, sigma * mu - tau * kappa)
            alpha = 0.98 * max_alpha(dZ, dS, dt, dk)

        def mu_at(a):
            g = sum(float(np.tensordot(Z[k] + a * dZ[k], S[k] + a * dS[k]))
                    for k in range(nb))
            return (g + (tau + a * dt) * (kappa + a * dk)) / ordn

        # keep tau*kappa >= gamma*mu: without this the iterate can drift down
        # the degenerate ray tau, kappa -> 0 which certifies nothing
        gamma = 1e-3
        for _ in range(25):
            if (tau + alpha * dt) * (kappa + alpha * dk) >= gamma * mu_at(alpha):
                break
            alpha *= 0.7
        if alpha < 1e-9:
            raise _IPMFailure(f"step length collapsed at iteration {it}")
        for k in range(nb):
            Z[k] = 0.5 * ((Z[k] + alpha * dZ[k]) + (Z[k] + alpha * dZ[k]).T)
            S[k] = 0.5 * ((S[k] + alpha * dS[k]) + (S[k] + alpha * dS[k]).T)
        u = u + alpha * du if nf else u
        y = y + alpha * dy
        tau += alpha * dt
        kappa += alpha * dk

    raise _IPMFailure(f"no convergence within {max_iter} iterations")


def _hsd_attempts(sizes, A_parts, A_free, b, c_parts, c_free, tol, max_iter):
    """Run the core with fallback initializations; loose outcomes only stand
    when no initialization does better."""
    last: Optional[_IPMFailure] = None
    best = None
    best_acc = math.inf

    def acc_of(res):
        return max(res.info.get("pres", 0.0), res.info.get("dres", 0.0),
                   res.info.get("relgap", 0.0))

    for init_scale in (1.0, 30.0, 0.03):
        try:
            res = _hsd_minimize(sizes, A_parts, A_free, b, c_parts, c_free,
                                tol, max_iter, init_scale=init_scale)
        except _IPMFailure as exc:
            last = exc
            continue
        if res.kind != "optimal" or not res.info.get("loose"):
            return res
        acc = acc_of(res)
        if acc < best_acc:
            best, best_acc = res, acc
        if best_acc <= 1e-9:
            break
    if best is not None:
        return best
    raise last if last is not None else _IPMFailure("unreachable")


# ---------------------------------------------------------------------------
# public solve entry points
# ---------------------------------------------------------------------------


def _verify_witness(problem: SDPProblem, Z: Dict[str, np.ndarray],
                    u: Optional[np.ndarray]):
    """Independent residual/eigenvalue check, separate from solver internals."""
    z_sv = [svec(Z[name]) for name, _ in problem.blocks]
    lhs = sum(Ab @ zv for Ab, zv in zip(problem.A_blocks, z_sv)) \
        if problem.m else np.zeros(0)
    if problem.n_free:
        lhs = lhs + problem.A_free @ (u if u is not None else np.zeros(problem.n_free))
    eq_resid = float(np.abs(lhs - problem.rhs).max()) if problem.m else 0.0
    eig_min = min([float(np.linalg.eigvalsh(Z[name])[0])
                   for name, _ in problem.blocks] + [math.inf])
    return eq_resid, eig_min


def _polish(problem: SDPProblem, Z: Dict[str, np.ndarray],
            u: Optional[np.ndarray]):
    """Least-norm correction moving a witness exactly onto the equalities."""
    if problem.m == 0:
        return dict(Z), u
    parts = [svec(Z[name]) for name, _ in problem.blocks]
    x = np.concatenate(parts + ([u if u is not None
                                 else np.zeros(problem.n_free)]
                                if problem.n_free else []))
    A = np.hstack([*problem.A_blocks, problem.A_free])
    delta, *_ = np.linalg.lstsq(A, problem.rhs - A @ x, rcond=None)
    x = x + delta
    out = {}
    ofs = 0
    for name, s in problem.blocks:
        d = svec_dim(s)
        out[name] = smat(x[ofs:ofs + d], s)
        ofs += d
    return out, (x[ofs:] if problem.n_free else u)


def _eig_clip(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    return (v * np.clip(w, 0.0, None)) @ v.T


def _ls_point(problem: SDPProblem):
    """Any solution of the affine equality system, ignoring the cone."""
    A = np.hstack([*problem.A_blocks, problem.A_free])
    x0, *_ = np.linalg.lstsq(A, problem.rhs, rcond=None)
    out = {}
    ofs = 0
    for name, sz in problem.blocks:
        d = svec_dim(sz)
        out[name] = smat(x0[ofs:ofs + d], sz)
        ofs += d
    return out, (x0[ofs:] if problem.n_free else np.zeros(0))


def solve(problem: SDPProblem, tol: float = 1e-8, max_iter: int = 200,
          feas_tol: float = FEAS_TOL,
          trace_cap: Optional[float] = None) -> SDPSolution:
    """Solve an SDP.  Problems with an objective are maximized; problems
    without one are decided through the phase-I construction."""
    if not problem.has_objective:
        return solve_feasibility(problem, tol=tol, max_iter=max_iter,
                                 feas_tol=feas_tol, trace_cap=trace_cap)
    return _solve_optimize(problem, tol, max_iter, trace_cap)


def _reduced(problem: SDPProblem):
    A = np.hstack([*problem.A_blocks, problem.A_free]) if problem.m else \
        np.zeros((0, sum(svec_dim(s) for _, s in problem.blocks) + problem.n_free))
    keep, consistent = _presolve(A, problem.rhs)
    A_parts = [Ab[keep] for Ab in problem.A_blocks]
    A_free = problem.A_free[keep]
    b = problem.rhs[keep]
    return A_parts, A_free, b, consistent


def _with_cap(sizes, A_parts, A_free, b, trace_cap):
    """Append the optional trace-cap row  sum tr Z_b / cap + slack = 1."""
    A_parts = [np.vstack([Ab, svec(np.eye(s))[None, :] / trace_cap])
               for Ab, s in zip(A_parts, sizes)]
    cap_col = np.zeros((b.shape[0] + 1, 1))
    cap_col[-1, 0] = 1.0
    A_parts.append(cap_col)
    A_free = np.vstack([A_free, np.zeros((1, A_free.shape[1]))])
    b = np.concatenate([b, [1.0]])
    return A_parts, A_free, b


def _solve_optimize(problem: SDPProblem, tol, max_iter, trace_cap) -> SDPSolution:
    A_parts, A_free, b, consistent = _reduced(problem)
    if not consistent:
        return SDPSolution(SolveStatus.INFEASIBLE, margin=-math.inf,
                           info={"reason": "inconsistent equalities"})
    sizes = [s for _, s in problem.blocks]
    if problem.obj_blocks is not None:
        c_parts = [-np.asarray(c, dtype=float) for c in problem.obj_blocks]
    else:
        c_parts = [np.zeros(svec_dim(s)) for s in sizes]
    c_free = -(problem.obj_free if problem.obj_free is not None
               else np.zeros(problem.n_free))
    if trace_cap is not None:
        A_parts, A_free, b = _with_cap(sizes, A_parts, A_free, b, trace_cap)
        sizes = sizes + [1]
        c_parts = c_parts + [np.zeros(1)]
    if b.shape[0] == 0:
        return SDPSolution(SolveStatus.ERROR,
                           info={"reason": "optimization without constraints"})
    A_parts, A_free, b = _scale_rows(A_parts, A_free, b)
    try:
        res = _hsd_attempts(sizes, A_parts, A_free, b, c_parts, c_free,
                            tol, max_iter)
    except _IPMFailure as exc:
        return SDPSolution(SolveStatus.ERROR, info={"reason": str(exc)})
    nb0 = len(problem.blocks)
    if res.kind == "pinfeas":
        return SDPSolution(SolveStatus.INFEASIBLE, margin=-math.inf,
                           iterations=res.iterations,
                           info={**res.info, "reason": "primal infeasible"})
    if res.kind == "unbounded":
        ray = {name: res.ray[k] for k, (name, _) in enumerate(problem.blocks)}
        return SDPSolution(SolveStatus.FEASIBLE, witness=ray,
                           free_values=res.ray_free,
                           objective_value=math.inf, iterations=res.iterations,
                           info={**res.info, "unbounded_objective": True})
    witness = {name: res.Z[k] for k, (name, _) in enumerate(problem.blocks)}
    ures = res.u[:problem.n_free] if problem.n_free else None
    witness, ures = _polish(problem, witness, ures)
    eq_resid, eig_min = _verify_witness(problem, witness, ures)
    info = {**res.info, "eq_resid": eq_resid, "eig_min": eig_min}
    if trace_cap is not None:
        info["cap_active"] = bool(res.Z[nb0][0, 0] < 1e-6)
    return SDPSolution(SolveStatus.FEASIBLE, witness=witness,
                       free_values=ures,
                       objective_value=-res.pobj, iterations=res.iterations,
                       info=info)


def solve_feasibility(problem: SDPProblem, tol: float = 1e-8,
                      max_iter: int = 200, feas_tol: float = FEAS_TOL,
                      trace_cap: Optional[float] = None) -> SDPSolution:
    """Phase-I feasibility with a signed margin.

    FEASIBLE when the best uniform eigenvalue slack t* exceeds +feas_tol,
    INFEASIBLE below -feas_tol.  Inside the band, a witness rescue clips the
    terminal iterate to the cone and re-checks the equalities; only a
    verified witness may promote the answer to FEASIBLE, otherwise the
    honest answer is MARGINAL.
    """
    if problem.has_objective:
        raise ValueError("solve_feasibility expects a problem without objective")
    A_parts, A_free, b, consistent = _reduced(problem)
    if not consistent:
        return SDPSolution(SolveStatus.INFEASIBLE, margin=-math.inf,
                           info={"reason": "inconsistent equalities"})
    sizes = [s for _, s in problem.blocks]
    nb = len(sizes)
    nf = problem.n_free
    if b.shape[0] == 0:
        witness = {name: np.eye(s) for name, s in problem.blocks}
        return SDPSolution(SolveStatus.FEASIBLE, witness=witness,
                           free_values=np.zeros(nf), margin=math.inf,
                           info={"reason": "no equality constraints"})
    # substitute Z_b = Z'_b + t I with Z'_b >= 0 and free t; maximize t
    t_col = np.zeros((b.shape[0], 1))
    for k in range(nb):
        t_col[:, 0] += A_parts[k] @ svec(np.eye(sizes[k]))
    A_free_x = np.hstack([A_free, t_col])
    c_parts = [np.zeros(svec_dim(s)) for s in sizes]
    c_free = np.zeros(nf + 1)
    c_free[-1] = -1.0          # minimize -t
    sizes_x = list(sizes)
    A_parts_x = list(A_parts)
    if trace_cap is not None:
        A_parts_x, A_free_x, b = _with_cap(sizes_x, A_parts_x, A_free_x, b,
                                           trace_cap)
        # the cap row also carries t through the identity substitution
        A_free_x[-1, -1] = float(sum(sizes)) / trace_cap
        sizes_x = sizes_x + [1]
        c_parts = c_parts + [np.zeros(1)]
    A_parts_x, A_free_x, b_x = _scale_rows(A_parts_x, A_free_x, b)
    try:
        res = _hsd_attempts(sizes_x, A_parts_x, A_free_x, b_x, c_parts, c_free,
                            tol, max_iter)
    except _IPMFailure as exc:
        return SDPSolution(SolveStatus.ERROR, info={"reason": str(exc)})
    eq_tol = max(_WITNESS_EQ_TOL,
                 _WITNESS_EQ_TOL * (np.abs(problem.rhs).max() if problem.m else 1.0))
    if res.kind == "pinfeas":
        # cannot happen for consistent equalities without a cap; stay honest
        return SDPSolution(SolveStatus.ERROR, iterations=res.iterations,
                           info={**res.info,
                                 "reason": "phase-I reported infeasible"})
    if res.kind == "unbounded":
        # t can grow without bound along the certified ray; convert it into
        # an explicit verified witness before claiming FEASIBLE
        t_ray = float(res.ray_free[nf])
        ray = {name: res.ray[k] + t_ray * np.eye(sizes[k])
               for k, (name, _) in enumerate(problem.blocks)}
        u_ray = res.ray_free[:nf] if nf else np.zeros(0)
        base, ubase = _ls_point(problem)
        for s in (1.0, 1e2, 1e4, 1e6, 1e8):
            cand = {name: base[name] + s * ray[name] for name, _ in problem.blocks}
            ucand = ubase + s * u_ray
            cand, ucand = _polish(problem, cand, ucand)
            eq_resid, eig_min = _verify_witness(problem, cand, ucand)
            if eq_resid <= eq_tol and eig_min > feas_tol:
                return SDPSolution(SolveStatus.FEASIBLE, witness=cand,
                                   free_values=ucand, margin=math.inf,
                                   iterations=res.iterations,
                                   info={**res.info, "unbounded_margin": True,
                                         "eq_resid": eq_resid,
                                         "eig_min": eig_min})
        return SDPSolution(SolveStatus.ERROR, iterations=res.iterations,
                           info={**res.info,
                                 "reason": "unbounded-margin certificate did "
                                           "not yield a verified witness"})
    t_star = float(res.u[nf])
    u = res.u[:nf] if nf else np.zeros(0)
    witness = {name: hermitian_part(res.Z[k] + t_star * np.eye(sizes[k])).real
               for k, (name, _) in enumerate(problem.blocks)}
    base_info = {**res.info, "t_star": t_star}
    if trace_cap is not None:
        base_info["cap_active"] = bool(res.Z[nb][0, 0] < 1e-6)
    it = res.iterations
    # widen the marginal band to the achieved solver accuracy
    acc = max(res.info.get("pres", 0.0), res.info.get("dres", 0.0),
              res.info.get("relgap", 0.0))
    band = max(feas_tol, 10.0 * acc * (1.0 + abs(t_star)))

    if t_star > band:
        witness, u = _polish(problem, witness, u)
        eq_resid, eig_min = _verify_witness(problem, witness, u)
        if eq_resid <= eq_tol and eig_min >= -_WITNESS_EIG_TOL:
            return SDPSolution(SolveStatus.FEASIBLE, witness=witness,
                               free_values=u, margin=t_star, iterations=it,
                               info={**base_info, "eq_resid": eq_resid,
                                     "eig_min": eig_min})
        return SDPSolution(SolveStatus.ERROR, margin=t_star, iterations=it,
                           info={**base_info,
                                 "reason": "witness failed verification",
                                 "eq_resid": eq_resid, "eig_min": eig_min})
    if t_star < -band:
        return SDPSolution(SolveStatus.INFEASIBLE, margin=t_star, iterations=it,
                           info=base_info)
    # marginal band: first re-solve at high accuracy (the rescue below needs
    # tiny equality residuals, or the projection ruins the eigenvalue floor)
    if tol > 1.1e-11:
        return solve_feasibility(problem, tol=1e-11,
                                 max_iter=max(max_iter, 300),
                                 feas_tol=feas_tol, trace_cap=trace_cap)
    # alternate equality projection and eigenvalue clipping to rescue a
    # boundary witness; only a verified witness promotes to FEASIBLE
    cand, uc = witness, u
    eq_resid, eig_min = math.inf, -math.inf
    for _ in range(400):
        cand, uc = _polish(problem, cand, uc)
        eq_resid, eig_min = _verify_witness(problem, cand, uc)
        if eig_min >= -0.5 * _WITNESS_EIG_TOL:
            break
        cand = {name: _eig_clip(mat) for name, mat in cand.items()}
    if eig_min < -_WITNESS_EIG_TOL:
        # projection plateau: a small identity shift can satisfy both
        # witness invariants at once (equalities are absolute-toleranced)
        shift = -eig_min * 1.05
        shifted = {name: mat + shift * np.eye(mat.shape[0])
                   for name, mat in cand.items()}
        resid_s, eig_s = _verify_witness(problem, shifted, uc)
        if resid_s <= eq_tol and eig_s >= -_WITNESS_EIG_TOL:
            cand, eq_resid, eig_min = shifted, resid_s, eig_s
    if eq_resid <= eq_tol and eig_min >= -_WITNESS_EIG_TOL:
        return SDPSolution(SolveStatus.FEASIBLE, witness=cand, free_values=uc,
                           margin=t_star, iterations=it,
                           info={**base_info, "eq_resid": eq_resid,
                                 "eig_min": eig_min, "rescued": True})
    return SDPSolution(SolveStatus.MARGINAL, witness=witness, free_values=u,
                       margin=t_star, iterations=it, info=base_info)


# ---------------------------------------------------------------------------
# complex Hermitian layer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeHermitian:
    """Handle for a Hermitian matrix unknown, parametrized by real scalars.

    Variable layout: n diagonal entries, then (Re, Im) pairs for i < j in
    row-major upper-triangle order.
    """

    name: str
    size: int
    start: int

    @property
    def n_vars(self) -> int:
        return self.size * self.size

    def var_index(self, i: int, j: int, imag: bool) -> int:
        n = self.size
        if i == j:
            if imag:
                raise ValueError("diagonal entries have no imaginary part")
            return self.start + i
        if i > j:
            i, j = j, i
        off = n + 2 * ((2 * n - i - 1) * i // 2 + (j - i - 1))
        return self.start + off + (1 if imag else 0)

    def imag_vars(self):
        n = self.size
        return {self.var_index(i, j, True) for i in range(n) for j in range(i + 1, n)}

    def entry_coeffs(self, i: int, j: int):
        """Complex coefficients of Y_ij over the real variables."""
        if i == j:
            return {self.var_index(i, i, False): 1.0 + 0j}
        conj = i > j
        re = self.var_index(i, j, False)
        im = self.var_index(i, j, True)
        return {re: 1.0 + 0j, im: (-1j if conj else 1j)}

    def assemble(self, values: np.ndarray) -> np.ndarray:
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            out[i, i] = values[self.var_index(i, i, False) - self.start]
            for j in range(i + 1, n):
                re = values[self.var_index(i, j, False) - self.start]
                im = values[self.var_index(i, j, True) - self.start]
                out[i, j] = re + 1j * im
                out[j, i] = re - 1j * im
        return out


def _herm_split(f: np.ndarray):
    """Hermitian data pair (Hre, Him) with tr(Hre C) = Re tr(F* C) and
    tr(Him C) = Im tr(F* C) for Hermitian C."""
    hre = 0.5 * (f + f.conj().T)
    him = 0.5j * (f - f.conj().T)
    return hre, him


class HermitianProblem:
    """Complex Hermitian PSD blocks, real free scalars (including Hermitian
    matrix unknowns), scalar equality rows with Hermitian data matrices, and
    an optional linear objective.

    ``solve`` realifies blocks through [[Re, -Im], [Im, Re]]; when every row
    is conjugation-invariant the equivalent real-restricted problem is solved
    directly at half the block size.
    """

    def __init__(self):
        self._blocks: List[Tuple[str, int]] = []
        self._n_free = 0
        self._free_herms: List[FreeHermitian] = []
        self._imag_vars: set = set()
        # row: (terms: {block: complex Hermitian}, free: {idx: complex!}, rhs complex)
        self._rows: List[Tuple[Dict[str, np.ndarray], Dict[int, complex], float]] = []
        self._obj: Optional[Tuple[Dict[str, np.ndarray], Dict[int, float]]] = None

    # -- variables ---------------------------------------------------------

    def add_block(self, name: str, size: int) -> str:
        if any(n == name for n, _ in self._blocks):
            raise ValueError(f"duplicate block {name!r}")
        self._blocks.append((name, size))
        return name

    def add_free(self, count: int = 1) -> range:
        start = self._n_free
        self._n_free += count
        return range(start, start + count)

    def add_free_hermitian(self, name: str, size: int) -> FreeHermitian:
        fh = FreeHermitian(name, size, self._n_free)
        self._n_free += fh.n_vars
        self._free_herms.append(fh)
        self._imag_vars |= fh.imag_vars()
        return fh

    # -- rows ----------------------------------------------------------------

    def add_scalar_row(self, block_terms: Dict[str, np.ndarray],
                       free_terms: Optional[Dict[int, float]], rhs: float):
        """sum_b tr(H_b C_b) + sum a_i u_i = rhs with Hermitian H, real rhs."""
        terms = {}
        sizes = dict(self._blocks)
        for name, h in block_terms.items():
            h = np.asarray(h, dtype=complex)
            if h.shape != (sizes[name],) * 2:
                raise ValueError(f"data for block {name!r} has wrong shape")
            terms[name] = h
        self._rows.append((terms, {int(k): complex(v) for k, v in
                                   (free_terms or {}).items()}, float(rhs)))

    def add_complex_row(self, block_data: Dict[str, np.ndarray],
                        free_terms: Optional[Dict[int, complex]], rhs: complex):
        """Complex equality sum_b tr(F_b* C_b) + sum c_i u_i = rhs, split
        into its real and imaginary parts (F need not be Hermitian)."""
        sizes = dict(self._blocks)
        res, ims = {}, {}
        for name, f in block_data.items():
            f = np.asarray(f, dtype=complex)
            if f.shape != (sizes[name],) * 2:
                raise ValueError(f"data for block {name!r} has wrong shape")
            hre, him = _herm_split(f)
            res[name] = hre
            ims[name] = him
        free_terms = {int(k): complex(v) for k, v in (free_terms or {}).items()}
        rhs = complex(rhs)
        fre = {i: complex(c.real) for i, c in free_terms.items() if c.real != 0.0}
        if any(np.abs(h).max() > 0 for h in res.values()) or fre or rhs.real:
            self._rows.append((res, fre, rhs.real))
        fim = {i: complex(c.imag) for i, c in free_terms.items() if c.imag != 0.0}
        if any(np.abs(h).max() > 0 for h in ims.values()) or fim or rhs.imag:
            self._rows.append((ims, fim, rhs.imag))

    def add_matrix_eq(self, terms, rhs):
        """Matrix equality sum(term values) = rhs, expanded into scalar rows.

        Terms (all values complex-linear in the unknowns):
          ("apply", block, A, m)      sum_pq A_pq C_pq with m x m blocks C_pq
          ("entry", block, scale)     scale * C
          ("blocktrace", block, m, scale) scale * (tr C_pq)_pq, m x m blocks
          ("freeherm", fh, scale)     scale * Y
          ("kron", coeff, fh)         coeff (x) Y
          ("kron_block", coeff, block) coeff (x) C for a PSD block C
          ("kron_scalar", coeff, j)   coeff * u_j
        """
        rhs = np.asarray(rhs, dtype=complex)
        dim = rhs.shape[0]
        sizes = dict(self._blocks)
        for r in range(dim):
            for s in range(r, dim):
                block_data: Dict[str, np.ndarray] = {}
                free_data: Dict[int, complex] = {}

                def addF(name, f):
                    block_data[name] = block_data.get(name, 0) + f

                def addv(idx, c):
                    free_data[idx] = free_data.get(idx, 0.0) + c

                for term in terms:
                    kind = term[0]
                    if kind == "apply":
                        _, name, A, mdim = term
                        A = np.asarray(A, dtype=complex)
                        e = np.zeros((mdim, mdim))
                        e[r, s] = 1.0
                        addF(name, np.kron(A.conj(), e))
                    elif kind == "entry":
                        _, name, scale = term
                        f = np.zeros((sizes[name],) * 2, dtype=complex)
                        f[r, s] = scale
                        addF(name, f)
                    elif kind == "blocktrace":
                        _, name, mdim, scale = term
                        ndim = sizes[name] // mdim
                        e = np.zeros((ndim, ndim))
                        e[r, s] = 1.0
                        addF(name, scale * np.kron(e, np.eye(mdim)))
                    elif kind == "freeherm":
                        _, fh, scale = term
                        for idx, c in fh.entry_coeffs(r, s).items():
                            addv(idx, scale * c)
                    elif kind == "kron":
                        _, coeff, fh = term
                        coeff = np.asarray(coeff, dtype=complex)
                        k = fh.size
                        cr, ar = divmod(r, k)
                        cs, bs = divmod(s, k)
                        if coeff[cr, cs] != 0:
                            for idx, c in fh.entry_coeffs(ar, bs).items():
                                addv(idx, coeff[cr, cs] * c)
                    elif kind == "kron_block":
                        _, coeff, name = term
                        coeff = np.asarray(coeff, dtype=complex)
                        k = sizes[name]
                        cr, ar = divmod(r, k)
                        cs, bs = divmod(s, k)
                        if coeff[cr, cs] != 0:
                            f = np.zeros((k, k), dtype=complex)
                            f[ar, bs] = coeff[cr, cs].conjugate()
                            addF(name, f)
                    elif kind == "kron_scalar":
                        _, coeff, j = term
                        coeff = np.asarray(coeff, dtype=complex)
                        if coeff[r, s] != 0:
                            addv(j, coeff[r, s])
                    else:
                        raise ValueError(f"unknown term kind {kind!r}")

                val = complex(rhs[r, s])
                # real row
                bre = {n: _herm_split(f)[0] for n, f in block_data.items()}
                fre = {i: c.real for i, c in free_data.items() if c.real != 0.0}
                if any(np.abs(h).max() > 0 for h in bre.values()) or fre or \
                        abs(val.real) > 0:
                    self._rows.append((bre, {i: complex(v) for i, v in fre.items()},
                                       val.real))
                # imaginary row
                bim = {n: _herm_split(f)[1] for n, f in block_data.items()}
                fim = {i: c.imag for i, c in free_data.items() if c.imag != 0.0}
                if any(np.abs(h).max() > 0 for h in bim.values()) or fim or \
                        abs(val.imag) > 0:
                    self._rows.append((bim, {i: complex(v) for i, v in fim.items()},
                                       val.imag))

    def set_objective(self, block_terms: Dict[str, np.ndarray],
                      free_terms: Optional[Dict[int, float]] = None):
        """Maximize sum tr(H_b C_b) + sum a.u (H Hermitian)."""
        self._obj = ({n: np.asarray(h, dtype=complex) for n, h in block_terms.items()},
                     dict(free_terms or {}))

    # -- building ------------------------------------------------------------

    def _is_real(self) -> bool:
        """True when restricting all unknowns to real entries is lossless.

        That holds when each row is either invariant under conjugating every
        unknown (real data, no imaginary-component variables) or flips sign
        entirely (imaginary data, rhs 0, only imaginary-component variables).
        """
        for bt, ft, rhs in self._rows:
            im_max = max([float(np.abs(h.imag).max()) for h in bt.values()] + [0.0])
            re_max = max([float(np.abs(h.real).max()) for h in bt.values()] + [0.0])
            keys = set(ft)
            even = im_max <= 1e-13 and not (keys & self._imag_vars)
            odd = re_max <= 1e-13 and abs(rhs) <= 1e-12 and \
                keys <= self._imag_vars
            if not (even or odd):
                return False
        if self._obj is not None:
            bt, ft = self._obj
            if max([float(np.abs(h.imag).max()) for h in bt.values()] + [0.0]) > 1e-13:
                return False
            if set(ft) & self._imag_vars:
                return False
        return True

    def build(self, force_realify: bool = False):
        """Return (SDPProblem, decoder)."""
        real_path = (not force_realify) and self._is_real()
        pb = ProblemBuilder()
        if real_path:
            for name, sz in self._blocks:
                pb.add_block(name, sz)
            kept_vars = sorted(set(range(self._n_free)) - self._imag_vars)
        else:
            for name, sz in self._blocks:
                pb.add_block(name, 2 * sz)
            kept_vars = list(range(self._n_free))
        var_map = {v: k for k, v in enumerate(kept_vars)}
        pb.add_free(len(kept_vars))
        for bt, ft, rhs in self._rows:
            if real_path:
                data = {n: h.real for n, h in bt.items()
                        if np.abs(h.real).max() > 0}
                free = {var_map[i]: c.real for i, c in ft.items()
                        if i in var_map and c.real != 0.0}
                if not data and not free:
                    continue   # conjugation-odd row, satisfied identically
                pb.add_row(data, free, rhs)
            else:
                data = {n: 0.5 * realify(h) for n, h in bt.items()}
                free = {var_map[i]: c.real for i, c in ft.items()}
                pb.add_row(data, free, rhs)
        if self._obj is not None:
            bt, ft = self._obj
            if real_path:
                pb.set_objective({n: h.real for n, h in bt.items()},
                                 {var_map[i]: float(a) for i, a in ft.items()})
            else:
                pb.set_objective({n: 0.5 * realify(h) for n, h in bt.items()},
                                 {var_map[i]: float(a) for i, a in ft.items()})
        decoder = _HermitianDecoder(self._blocks, self._free_herms,
                                    self._n_free, kept_vars, real_path)
        return pb.build(), decoder

    # -- solving -------------------------------------------------------------

    def solve(self, tol: float = 1e-8, max_iter: int = 200,
              feas_tol: float = FEAS_TOL, trace_cap: Optional[float] = None,
              force_realify: bool = False):
        problem, decoder = self.build(force_realify=force_realify)
        sol = solve(problem, tol=tol, max_iter=max_iter, feas_tol=feas_tol,
                    trace_cap=trace_cap)
        return HermitianSolution(sol, decoder)


class _HermitianDecoder:
    def __init__(self, blocks, free_herms, n_free, kept_vars, real_path):
        self.blocks = blocks
        self.free_herms = {fh.name: fh for fh in free_herms}
        self.n_free = n_free
        self.kept_vars = kept_vars
        self.real_path = real_path

    def full_free(self, free_values):
        out = np.zeros(self.n_free)
        if free_values is not None:
            for k, v in enumerate(self.kept_vars):
                out[v] = free_values[k]
        return out

    def block(self, name, witness):
        raw = witness.get(name)
        if raw is None:
            return None
        if self.real_path:
            return np.asarray(raw, dtype=complex)
        return derealify(raw)


@dataclass
class HermitianSolution:
    """Complex-space view of an engine solution."""

    raw: SDPSolution
    decoder: _HermitianDecoder

    @property
    def status(self) -> SolveStatus:
        return self.raw.status

    @property
    def feasible(self) -> bool:
        return self.raw.status is SolveStatus.FEASIBLE

    @property
    def margin(self):
        return self.raw.margin

    @property
    def objective_value(self):
        return self.raw.objective_value

    @property
    def info(self):
        return self.raw.info

    def block(self, name: str):
        return self.decoder.block(name, self.raw.witness)

    def free_hermitian(self, fh: FreeHermitian):
        return fh.assemble(self.decoder.full_free(self.raw.free_values)[
            fh.start:fh.start + fh.n_vars])

    def free_value(self, idx: int) -> float:
        return float(self.decoder.full_free(self.raw.free_values)[idx])


def build_from_complex(problem: HermitianProblem) -> SDPProblem:
    """Realified real-symmetric problem equivalent to the Hermitian one.

    Always doubles block sizes via [[Re, -Im], [Im, Re]], even for purely
    real data; the witness back-map is available through
    ``problem.build(force_realify=True)``.
    """
    built, _ = problem.build(force_realify=True)
    return built
