"""Dense linear algebra over the prime field F_p (numpy int64, entries in [0, p))."""

from __future__ import annotations

import numpy as np


def inverse_table(p: int) -> np.ndarray:
    return np.array([pow(x, -1, p) if x else 0 for x in range(p)], dtype=np.int64)


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = a.shape
    inv = inverse_table(p)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        f = a[:, c].copy()
        f[r] = 0
        a = (a - np.outer(f, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m, p: int) -> int:
    return len(rref(m, p)[1])


def nullspace(m, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : m @ x == 0}``."""
    m = np.array(m, dtype=np.int64)
    cols = m.shape[1]
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in zip(r, pivots):
            basis[i, pc] = (-row[f]) % p
    return basis


def solve(a, b, p: int) -> np.ndarray | None:
    """Some ``x`` with ``a @ x == b`` over F_p, or ``None``."""
    a = np.array(a, dtype=np.int64)
    b = np.array(b, dtype=np.int64).reshape(-1, 1)
    r, pivots = rref(np.hstack([a, b]), p)
    n = a.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, pc in zip(r, pivots):
        x[pc] = row[n]
    return x


def batched_nonsingular(mats: np.ndarray, p: int) -> np.ndarray:
    """For a stack of square matrices, which are invertible mod p."""
    a = np.array(mats, dtype=np.int64) % p
    n, d, _ = a.shape
    ok = np.ones(n, dtype=bool)
    inv = inverse_table(p)
    idx = np.arange(n)
    for c in range(d):
        nz = a[:, c:, c] != 0
        ok &= nz.any(axis=1)
        piv = c + nz.argmax(axis=1)
        top = a[idx, c].copy()
        a[idx, c] = a[idx, piv]
        a[idx, piv] = top
        a[:, c, :] = (a[:, c, :] * inv[a[:, c, c]][:, None]) % p
        f = a[:, :, c].copy()
        f[:, c] = 0
        a = (a - f[:, :, None] * a[:, c, None, :]) % p
    return ok


def span_elements(basis: np.ndarray, p: int) -> np.ndarray:
    """Every element of the F_p-span of the rows of ``basis``."""
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    coeffs = digits(np.arange(p ** k), p, k)
    return (coeffs @ basis) % p if k else np.zeros((1, basis.shape[1]), dtype=np.int64)


def digits(indices: np.ndarray, p: int, d: int) -> np.ndarray:
    """Base-p digits (least significant first) of each index, shape ``(len, d)``."""
    out = np.empty((len(indices), d), dtype=np.int64)
    q = np.asarray(indices, dtype=np.int64)
    for i in range(d):
        out[:, i] = q % p
        q = q // p
    return out
