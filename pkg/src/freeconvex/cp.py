"""Choi matrices, Kraus decompositions, and completely positive
interpolation between Hermitian tuples.

A linear map Phi: M_n -> M_m is stored through its Choi matrix, the mn x mn
Hermitian block matrix C with m x m blocks C_pq = Phi(E_pq).  Phi is
completely positive exactly when C >= 0, and then C = sum_l w_l w_l* yields
Kraus operators V_l (n x m) with Phi(X) = sum_l V_l* X V_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from .algebra import HermitianTuple, hermitian_part, require_hermitian
from .sdp import FEAS_TOL, HermitianProblem, SolveStatus

__all__ = [
    "ChoiMatrix",
    "KrausDecomposition",
    "InterpolationMode",
    "InterpolationResult",
    "choi_of_kraus",
    "kraus_of_choi",
    "apply_choi",
    "interpolate",
    "NotCompletelyPositive",
]


class NotCompletelyPositive(ValueError):
    """Raised when a Choi matrix is not positive semidefinite."""


class InterpolationMode(Enum):
    CP = "cp"                 # any completely positive map
    UNITAL = "unital"         # Phi(I) = I
    CHANNEL = "channel"       # trace preserving
    OPERATION = "operation"   # trace non-increasing on PSD inputs


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix of a map M_n -> M_m, blocks C_pq = Phi(E_pq)."""

    n: int
    m: int
    C: np.ndarray

    def __post_init__(self):
        c = require_hermitian(self.C, what="Choi matrix")
        if c.shape[0] != self.n * self.m:
            raise ValueError(f"Choi matrix must have size n*m = {self.n * self.m}")
        c.setflags(write=False)
        object.__setattr__(self, "C", c)

    def block(self, p: int, q: int) -> np.ndarray:
        m = self.m
        return self.C[p * m:(p + 1) * m, q * m:(q + 1) * m]

    def as_tensor(self) -> np.ndarray:
        """Shape (n, m, n, m): indices (p, i, q, j)."""
        return self.C.reshape(self.n, self.m, self.n, self.m)

    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.C)[0])

    def trace_matrix(self) -> np.ndarray:
        """(tr C_pq)_pq, the n x n matrix deciding the trace conditions."""
        return np.trace(self.as_tensor(), axis1=1, axis2=3)

    def block_sum_diag(self) -> np.ndarray:
        """sum_p C_pp = Phi(I_n)."""
        return sum(self.block(p, p) for p in range(self.n))


@dataclass(frozen=True)
class KrausDecomposition:
    """Operators V_l (n x m) realizing Phi(X) = sum_l V_l* X V_l."""

    n: int
    m: int
    ops: tuple

    def __init__(self, ops: Sequence[np.ndarray], n: Optional[int] = None,
                 m: Optional[int] = None):
        mats = tuple(np.array(v, dtype=complex) for v in ops)
        if mats:
            n, m = mats[0].shape
            if any(v.shape != (n, m) for v in mats):
                raise ValueError("all Kraus operators must share one shape")
        elif n is None or m is None:
            raise ValueError("empty decomposition needs explicit n, m")
        for v in mats:
            v.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "ops", mats)

    def __len__(self):
        return len(self.ops)

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.m, self.m), dtype=complex)
        for v in self.ops:
            out += v.conj().T @ x @ v
        return out

    def stacked(self) -> np.ndarray:
        """Column-stacked V = col(V_1, ..., V_mu), so V*V = Phi(I)."""
        if not self.ops:
            return np.zeros((0, self.m), dtype=complex)
        return np.vstack(self.ops)


def choi_of_kraus(k: KrausDecomposition) -> ChoiMatrix:
    """C_pq = sum_l V_l* E_pq V_l; one rank-one slab per Kraus operator."""
    n, m = k.n, k.m
    c = np.zeros((n * m, n * m), dtype=complex)
    for v in k.ops:
        w = v.conj().reshape(n * m)
        c += np.outer(w, w.conj())
    return ChoiMatrix(n, m, c)


def kraus_of_choi(c: ChoiMatrix, rank_tol: float = 1e-10) -> KrausDecomposition:
    """Eigendecomposition-derived Kraus operators; count = numerical rank."""
    w, vecs = np.linalg.eigh(c.C)
    lam_max = max(float(w[-1]), 0.0)
    if float(w[0]) < -max(rank_tol, rank_tol * lam_max):
        raise NotCompletelyPositive(
            f"not completely positive: Choi eigenvalue {w[0]:.3e}")
    ops = []
    for lam, vec in zip(w, vecs.T):
        if lam > rank_tol * max(lam_max, 1e-300):
            ops.append(np.sqrt(lam) * vec.conj().reshape(c.n, c.m))
    return KrausDecomposition(ops, n=c.n, m=c.m)


def apply_choi(c: ChoiMatrix, x: np.ndarray) -> np.ndarray:
    """Phi(X) = sum_pq X_pq C_pq."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (c.n, c.n):
        raise ValueError(f"input must be {c.n} x {c.n}")
    return np.einsum("pq,piqj->ij", x, c.as_tensor())


@dataclass
class InterpolationResult:
    """Outcome of a cp interpolation query."""

    status: SolveStatus
    mode: InterpolationMode
    choi: Optional[ChoiMatrix] = None
    margin: Optional[float] = None
    iterations: int = 0
    info: dict = None

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.FEASIBLE

    def __bool__(self) -> bool:
        if self.status is SolveStatus.FEASIBLE:
            return True
        if self.status is SolveStatus.INFEASIBLE:
            return False
        raise ValueError(f"interpolation status {self.status.value} is not a "
                         "yes/no answer")

    def kraus(self, rank_tol: float = 1e-10) -> KrausDecomposition:
        if self.choi is None:
            raise ValueError("no witness available")
        return kraus_of_choi(self.choi, rank_tol=rank_tol)


def _coerce_mode(mode) -> InterpolationMode:
    if isinstance(mode, InterpolationMode):
        return mode
    return InterpolationMode(str(mode).lower())


def interpolation_problem(a: HermitianTuple, b: HermitianTuple,
                          mode: InterpolationMode,
                          extra_psd_choi_trace: Optional[float] = None):
    """Assemble the Choi-variable feasibility problem Phi(A_j) = B_j.

    The optional trace bound tr(C) <= value supports the ex situ tracial
    dual; it is encoded with a scalar slack block.
    """
    if a.g != b.g:
        raise ValueError(f"tuples have different lengths {a.g} vs {b.g}")
    n, m = a.dim, b.dim
    hp = HermitianProblem()
    hp.add_block("C", n * m)
    for aj, bj in zip(a, b):
        hp.add_matrix_eq([("apply", "C", aj, m)], bj)
    if mode is InterpolationMode.UNITAL:
        hp.add_matrix_eq([("apply", "C", np.eye(n), m)], np.eye(m))
    elif mode is InterpolationMode.CHANNEL:
        hp.add_matrix_eq([("blocktrace", "C", m, 1.0)], np.eye(n))
    elif mode is InterpolationMode.OPERATION:
        hp.add_block("D", n)
        hp.add_matrix_eq([("blocktrace", "C", m, 1.0), ("entry", "D", 1.0)],
                         np.eye(n))
    if extra_psd_choi_trace is not None:
        hp.add_block("s", 1)
        hp.add_scalar_row({"C": np.eye(n * m), "s": np.eye(1)}, {},
                          float(extra_psd_choi_trace))
    return hp


def interpolate(a: HermitianTuple, b: HermitianTuple, mode=InterpolationMode.CP,
                tol: float = 1e-8, max_iter: int = 200,
                feas_tol: float = FEAS_TOL,
                extra_psd_choi_trace: Optional[float] = None) -> InterpolationResult:
    """Decide existence of a cp map of the requested kind with Phi(A_j) = B_j.

    FEASIBLE answers carry a positive semidefinite Choi witness satisfying
    the interpolation constraints to working precision; INFEASIBLE answers
    carry the signed phase-I margin, so decisive rejections are
    distinguishable from near-boundary ones.
    """
    mode = _coerce_mode(mode)
    hp = interpolation_problem(a, b, mode,
                               extra_psd_choi_trace=extra_psd_choi_trace)
    sol = hp.solve(tol=tol, max_iter=max_iter, feas_tol=feas_tol)
    n, m = a.dim, b.dim
    choi = None
    if sol.feasible:
        raw = sol.block("C")
        w, v = np.linalg.eigh(raw)
        psd = (v * np.clip(w, 0.0, None)) @ v.conj().T
        choi = ChoiMatrix(n, m, hermitian_part(psd))
    return InterpolationResult(sol.status, mode, choi=choi, margin=sol.margin,
                               iterations=sol.raw.iterations, info=sol.info)
