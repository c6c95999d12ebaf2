"""Sum-of-squares certificates of positivity on spectrahedrops.

A symmetric free polynomial p of degree <= 2r+1 is PSD on the x projection
of a monic pencil L(x, y) exactly when it decomposes as

    p = sigma + sum_l q_l* L q_l,

with sigma a sum of Hermitian squares of degree-r polynomials, the weights
q_l degree-r polynomial columns in the x variables only, and every
y coefficient cancelling.  Both parts are stored as Gram matrices over the
graded word basis: S for sigma and G for the pencil part, with G indexed by
(word, pencil coordinate) stacked over the mu polynomial columns, so the
number of weights l is simply absorbed into the rank of G.  The degree
bound is exact: top-degree words 2r+1 arise only from pencil cross terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (HermitianTuple, LinearPencil, NCPolynomial,
                      hermitian_part, word_key)
from .sdp import FEAS_TOL, HermitianProblem, SolveStatus

__all__ = [
    "WordBasis",
    "Certificate",
    "CertificateSearch",
    "expand_certificate",
    "verify_certificate",
    "search_certificate",
    "extract_weights",
]

Y_RESIDUAL_TOL = 1e-9
COEFF_TOL = 1e-6


@dataclass(frozen=True)
class WordBasis:
    """All words of degree <= r in letters 1..g, graded lexicographic."""

    g: int
    r: int

    @property
    def words(self) -> Tuple[tuple, ...]:
        out = [()]
        for k in range(1, self.r + 1):
            out.extend(itertools.product(range(1, self.g + 1), repeat=k))
        return tuple(sorted(out, key=word_key))

    def __len__(self):
        return sum(self.g ** k for k in range(self.r + 1))

    def index(self, w) -> int:
        return self.words.index(tuple(w))


@dataclass(frozen=True)
class Certificate:
    """Gram data (S, G) for p = sigma + sum q_l* L q_l.

    S is Hermitian PSD of size mu*N; G is Hermitian PSD of size N*d*mu with
    the index layout ((word a)*d + pencil coordinate c)*mu + column i, where
    N is the word-basis size.
    """

    g: int
    d: int
    mu: int
    r: int
    S: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        n = len(WordBasis(self.g, self.r))
        s = hermitian_part(self.S) if np.asarray(self.S).size else \
            np.zeros((0, 0), dtype=complex)
        gm = hermitian_part(self.G) if np.asarray(self.G).size else \
            np.zeros((0, 0), dtype=complex)
        if s.shape[0] != self.mu * n:
            raise ValueError(f"S must have size mu*N = {self.mu * n}")
        if gm.shape[0] != n * self.d * self.mu:
            raise ValueError(f"G must have size N*d*mu = {n * self.d * self.mu}")
        s.setflags(write=False)
        gm.setflags(write=False)
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "G", gm)

    def g_index(self, a: int, c: int, i: int) -> int:
        return (a * self.d + c) * self.mu + i

    def s_index(self, a: int, i: int) -> int:
        return a * self.mu + i

    def pencil_contraction(self, m: np.ndarray, a: int, b: int) -> np.ndarray:
        """mu x mu matrix sum_ce M_ce G[(a,c,.),(b,e,.)]."""
        d, mu = self.d, self.mu
        blk = self.G[a * d * mu:(a + 1) * d * mu, b * d * mu:(b + 1) * d * mu]
        t = blk.reshape(d, mu, d, mu)
        return np.einsum("ce,ciej->ij", np.asarray(m, dtype=complex), t)

    def s_block(self, a: int, b: int) -> np.ndarray:
        mu = self.mu
        return self.S[a * mu:(a + 1) * mu, b * mu:(b + 1) * mu]

    def min_eig(self) -> float:
        vals = []
        if self.S.size:
            vals.append(float(np.linalg.eigvalsh(self.S)[0]))
        if self.G.size:
            vals.append(float(np.linalg.eigvalsh(self.G)[0]))
        return min(vals) if vals else 0.0


def expand_certificate(cert: Certificate, pencil: LinearPencil,
                       y_tol: float = Y_RESIDUAL_TOL) -> NCPolynomial:
    """Symbolic expansion of sigma + sum q_l* L q_l over the word basis.

    The result is a polynomial in the x variables of degree <= 2r+1; any
    surviving y coefficient above `y_tol` is an annihilation failure.
    """
    if pencil.d != cert.d or pencil.g != cert.g:
        raise ValueError("certificate and pencil shapes disagree")
    basis = WordBasis(cert.g, cert.r).words
    terms: Dict[tuple, np.ndarray] = {}

    def add(word, mat):
        if word in terms:
            terms[word] = terms[word] + mat
        else:
            terms[word] = np.array(mat)

    for a, wa in enumerate(basis):
        ra = wa[::-1]
        for b, wb in enumerate(basis):
            add(ra + wb, cert.s_block(a, b))
            add(ra + wb, cert.pencil_contraction(pencil.A0, a, b))
            for j, coeff in enumerate(pencil.x_coeffs):
                add(ra + (j + 1,) + wb, cert.pencil_contraction(coeff, a, b))
    y_resid = 0.0
    for k, coeff in enumerate(pencil.y_coeffs):
        for a in range(len(basis)):
            for b in range(len(basis)):
                y_resid = max(y_resid, float(np.abs(
                    cert.pencil_contraction(coeff, a, b)).max()))
    if y_resid > y_tol:
        raise ValueError(f"annihilation violated: y coefficients survive "
                         f"at {y_resid:.3e}")
    return NCPolynomial(cert.g, cert.mu, cert.mu,
                        {w: m for w, m in terms.items()
                         if np.abs(m).max() > 1e-14})


def verify_certificate(p: NCPolynomial, cert: Certificate,
                       pencil: LinearPencil,
                       coeff_tol: float = COEFF_TOL):
    """Check a certificate against p: coefficientwise match of the
    expansion, PSD Gram matrices, and the annihilation conditions at the
    certificate invariant tolerance 1e-7.

    Returns (ok, max coefficient residual).
    """
    if not p.is_symmetric(1e-10):
        raise ValueError("p must be symmetric")
    try:
        expanded = expand_certificate(cert, pencil, y_tol=1e-7)
    except ValueError:
        return False, np.inf
    resid = p.max_coeff_diff(expanded)
    ok = resid <= coeff_tol and cert.min_eig() >= -1e-8
    return ok, resid


@dataclass
class CertificateSearch:
    status: SolveStatus
    certificate: Optional[Certificate] = None
    residual: Optional[float] = None
    margin: Optional[float] = None
    info: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.FEASIBLE

    def __bool__(self):
        if self.status is SolveStatus.FEASIBLE:
            return True
        if self.status is SolveStatus.INFEASIBLE:
            return False
        raise ValueError(f"status {self.status.value} is not a yes/no answer")


def _place(fdict, name, idx_r, idx_c, value, size):
    f = fdict.get(name)
    if f is None:
        f = np.zeros((size, size), dtype=complex)
        fdict[name] = f
    f[idx_r, idx_c] += value


def search_certificate(p: NCPolynomial, pencil: LinearPencil, r: int,
                       tol: float = 1e-8, max_iter: int = 200,
                       feas_tol: float = FEAS_TOL) -> CertificateSearch:
    """Search the Gram feasibility problem for a degree-r certificate.

    Coefficient matching runs over every word of degree <= 2r+1 in the x
    variables; words containing a y letter must cancel, which pins the
    pencil Gram against each y coefficient pairwise.  FEASIBLE results are
    re-verified through :func:`verify_certificate` before they are returned.
    """
    if not pencil.monic:
        raise ValueError("certificate search needs a monic pencil")
    if not p.is_symmetric(1e-10):
        raise ValueError("p must be symmetric")
    if p.rows != p.cols:
        raise ValueError("p must be square matrix valued")
    if p.degree > 2 * r + 1:
        raise ValueError(f"degree {p.degree} exceeds 2r+1 = {2 * r + 1}")
    if p.g != pencil.g:
        raise ValueError("variable counts disagree")
    g, d, mu = pencil.g, pencil.d, p.rows
    basis = WordBasis(g, r).words
    n = len(basis)
    s_size = mu * n
    g_size = n * d * mu

    def gidx(a, c, i):
        return (a * d + c) * mu + i

    # buckets: which (a, b [, j]) produce each x word
    bucket0: Dict[tuple, List[Tuple[int, int]]] = {}
    bucketx: Dict[tuple, List[Tuple[int, int, int]]] = {}
    for a, wa in enumerate(basis):
        ra = wa[::-1]
        for b, wb in enumerate(basis):
            bucket0.setdefault(ra + wb, []).append((a, b))
            for j in range(1, g + 1):
                bucketx.setdefault(ra + (j,) + wb, []).append((a, j, b))
    words = sorted(set(bucket0) | set(bucketx) | set(p.terms), key=word_key)

    hp = HermitianProblem()
    hp.add_block("S", s_size)
    hp.add_block("G", g_size)
    for v in words:
        target = p.coeff(v)
        pairs0 = bucket0.get(v, [])
        pairsx = bucketx.get(v, [])
        for i in range(mu):
            for j_col in range(mu):
                fS = {}
                fG = {}
                for a, b in pairs0:
                    _place(fS, "S", a * mu + i, b * mu + j_col, 1.0, s_size)
                    for c in range(d):
                        for e in range(d):
                            w = complex(pencil.A0[c, e]).conjugate()
                            if w:
                                _place(fG, "G", gidx(a, c, i),
                                       gidx(b, e, j_col), w, g_size)
                for a, jvar, b in pairsx:
                    coeff = pencil.x_coeffs[jvar - 1]
                    for c in range(d):
                        for e in range(d):
                            w = complex(coeff[c, e]).conjugate()
                            if w:
                                _place(fG, "G", gidx(a, c, i),
                                       gidx(b, e, j_col), w, g_size)
                hp.add_complex_row({**fS, **fG}, None, complex(target[i, j_col]))
    # annihilation: each y coefficient contracts to zero against every word
    # pair (these are exactly the coefficients of the y words)
    for coeff in pencil.y_coeffs:
        for a in range(n):
            for b in range(n):
                for i in range(mu):
                    for j_col in range(mu):
                        fG = {}
                        for c in range(d):
                            for e in range(d):
                                w = complex(coeff[c, e]).conjugate()
                                if w:
                                    _place(fG, "G", gidx(a, c, i),
                                           gidx(b, e, j_col), w, g_size)
                        if fG:
                            hp.add_complex_row(fG, None, 0.0)
    sol = hp.solve(tol=tol, max_iter=max_iter, feas_tol=feas_tol)
    if not sol.feasible:
        return CertificateSearch(sol.status, margin=sol.margin, info=sol.info)
    sraw = sol.block("S")
    graw = sol.block("G")
    cert = Certificate(g, d, mu, r, sraw, graw)
    ok, resid = verify_certificate(p, cert, pencil)
    if not ok:
        return CertificateSearch(SolveStatus.ERROR, certificate=cert,
                                 residual=resid, margin=sol.margin,
                                 info={**sol.info,
                                       "reason": "certificate failed "
                                       "re-verification"})
    return CertificateSearch(SolveStatus.FEASIBLE, certificate=cert,
                             residual=resid, margin=sol.margin, info=sol.info)


def extract_weights(cert: Certificate, rank_tol: float = 1e-10):
    """Eigendecomposition of the Gram matrices into explicit polynomials.

    Returns (sos_factors, pencil_weights): lists of mu x mu and d x mu
    polynomials h_i and q_l with sigma = sum h_i* h_i and pencil part
    sum q_l* L q_l.
    """
    basis = WordBasis(cert.g, cert.r).words
    mu, d = cert.mu, cert.d
    sos = []
    if cert.S.size:
        w, vecs = np.linalg.eigh(cert.S)
        top = max(float(w[-1]), 0.0)
        for lam, vec in zip(w, vecs.T):
            if lam > rank_tol * max(top, 1e-300):
                mat = np.sqrt(lam) * vec.reshape(len(basis), mu)
                terms = {wa: mat[a].conj().reshape(1, mu)
                         for a, wa in enumerate(basis)
                         if np.abs(mat[a]).max() > 1e-14}
                if terms:
                    sos.append(NCPolynomial(cert.g, 1, mu, terms))
    weights = []
    if cert.G.size:
        w, vecs = np.linalg.eigh(cert.G)
        top = max(float(w[-1]), 0.0)
        for lam, vec in zip(w, vecs.T):
            if lam > rank_tol * max(top, 1e-300):
                h = np.sqrt(lam) * vec.reshape(len(basis), d, mu)
                terms = {}
                for a, wa in enumerate(basis):
                    q_a = h[a].conj()   # Q_{l,a}[c, i] = conj(h[(a,c,i)])
                    if np.abs(q_a).max() > 1e-14:
                        terms[wa] = q_a
                if terms:
                    weights.append(NCPolynomial(cert.g, d, mu, terms))
    return sos, weights
