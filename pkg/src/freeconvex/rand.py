"""Seeded random generators for Hermitian data, used by tests and scripts."""

from __future__ import annotations

import numpy as np

from .algebra import HermitianTuple, hermitian_part


def rng(seed=0) -> np.random.Generator:
    return np.random.default_rng(seed)


def rand_complex(gen, rows, cols, scale=1.0):
    return scale * (gen.standard_normal((rows, cols))
                    + 1j * gen.standard_normal((rows, cols)))


def rand_hermitian(gen, n, scale=1.0, real=False):
    m = gen.standard_normal((n, n))
    if not real:
        m = m + 1j * gen.standard_normal((n, n))
    return hermitian_part(scale * m)


def rand_psd(gen, n, rank=None, scale=1.0, real=False):
    rank = n if rank is None else rank
    v = gen.standard_normal((n, rank))
    if not real:
        v = v + 1j * gen.standard_normal((n, rank))
    return scale * (v @ v.conj().T) / max(rank, 1)


def rand_tuple(gen, g, n, scale=1.0, real=False) -> HermitianTuple:
    return HermitianTuple([rand_hermitian(gen, n, scale, real) for _ in range(g)])


def rand_unitary(gen, n, real=False):
    m = gen.standard_normal((n, n))
    if not real:
        m = m + 1j * gen.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_kraus(gen, n, m, count, normalize=None):
    """count Kraus operators of shape n x m; normalize in {None, 'channel',
    'operation', 'unital'} rescales the family accordingly."""
    ops = [rand_complex(gen, n, m, 1.0 / np.sqrt(count * max(n, m)))
           for _ in range(count)]
    if normalize is None:
        return ops
    if normalize == "unital":
        s = sum(v.conj().T @ v for v in ops)
        w = np.linalg.inv(np.linalg.cholesky(s).conj().T)
        return [v @ w for v in ops]
    s = sum(v @ v.conj().T for v in ops)
    if normalize == "channel":
        w = np.linalg.inv(np.linalg.cholesky(s))
        return [w @ v for v in ops]
    if normalize == "operation":
        lam = float(np.linalg.eigvalsh(s)[-1])
        return [v / np.sqrt(lam * 1.25) for v in ops]
    raise ValueError(f"unknown normalization {normalize!r}")
