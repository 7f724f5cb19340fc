"""Permutation vectors of the k-copy moment space and their Gram matrices.

A permutation ``sigma`` of ``{0, ..., k-1}`` is a tuple in one-line notation
(``sigma[c]`` is the image of ``c``); permutations are always enumerated in
lexicographic order.  The permutation operator ``V_sigma`` moves the content
of copy ``c`` into copy ``sigma[c]``, and its vectorisation places the k ket
copies before the k bra copies:

    psi_sigma[a_1..a_k, b_1..b_k] = q^{-k/2} * prod_c [a_{sigma(c)} == b_c]

Moment-space layouts
--------------------
*copy-major*: the natural index of ``U^{(x)k} (x) conj(U)^{(x)k}`` on n qubits,
i.e. ket copy 1 (n qubit bits), ..., ket copy k, bra copy 1, ..., bra copy k.

*site-major*: the MomentState layout.  Qubit sites are the outer factors (site
1 most significant) and each site carries its k ket-copy bits followed by its
k bra-copy bits, local dimension ``4^k``.  In this layout a global
permutation vector is the n-fold tensor power of the single-qubit one.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations as _iter_perms

import numpy as np

from .errors import InvalidArgument

K_MAX = 12


def permutations(k: int) -> list[tuple[int, ...]]:
    if not 1 <= k <= K_MAX:
        raise InvalidArgument(f"k must be in [1, {K_MAX}], got {k}")
    return list(_iter_perms(range(k)))


def inverse(sigma) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for c, s in enumerate(sigma):
        inv[s] = c
    return tuple(inv)


def count_cycles(perm) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycles += 1
        c = start
        while not seen[c]:
            seen[c] = True
            c = perm[c]
    return cycles


def cycle_count(sigma, tau) -> int:
    """Number of cycles (fixed points included) of ``sigma^{-1} tau``."""
    if len(sigma) != len(tau):
        raise InvalidArgument("permutations act on different numbers of copies")
    inv = inverse(sigma)
    return count_cycles(tuple(inv[t] for t in tau))


def gram_matrix(k: int, q: int) -> np.ndarray:
    """Overlaps ``W[s, t] = q ** (c(s^-1 t) - k)`` of unit permutation vectors."""
    if q < 2:
        raise InvalidArgument(f"q must be >= 2, got {q}")
    perms = permutations(k)
    w = np.empty((len(perms), len(perms)))
    for i, s in enumerate(perms):
        for j in range(i, len(perms)):
            w[i, j] = w[j, i] = float(q) ** (cycle_count(s, perms[j]) - k)
    return w


def permutation_vector(sigma, k: int, q: int) -> np.ndarray:
    """Unit vectorisation of ``V_sigma`` on k copies of ``C^q`` (copy-major)."""
    sigma = tuple(sigma)
    if len(sigma) != k or sorted(sigma) != list(range(k)):
        raise InvalidArgument(f"{sigma} is not a permutation of {k} elements")
    v = np.zeros((q,) * (2 * k))
    for a in np.ndindex(*(q,) * k):
        b = tuple(a[s] for s in sigma)
        v[a + b] = 1.0
    return v.ravel() / q ** (k / 2)


@lru_cache(maxsize=None)
def site_vectors(k: int) -> np.ndarray:
    """Rows: single-qubit permutation vectors (q = 2), length ``4^k``."""
    return np.stack([permutation_vector(s, k, 2) for s in permutations(k)])


@lru_cache(maxsize=None)
def pair_vectors(k: int) -> np.ndarray:
    """Rows: permutation vectors of a qubit pair in site-major layout (``16^k``)."""
    single = site_vectors(k)
    return np.stack([np.kron(v, v) for v in single])


def product_vectors(n: int, k: int) -> np.ndarray:
    """Rows: the global vectors ``psi_sigma^{(x)n}`` in site-major layout."""
    out = []
    for v in site_vectors(k):
        p = v
        for _ in range(n - 1):
            p = np.kron(p, v)
        out.append(p)
    return np.stack(out)


def site_major_axes(n: int, k: int) -> list[int]:
    """Axis order taking a copy-major tensor of 2kn qubit bits to site-major."""
    axes = []
    for j in range(n):
        axes.extend(c * n + j for c in range(k))
        axes.extend(k * n + c * n + j for c in range(k))
    return axes


def copy_to_site_major(x, n: int, k: int) -> np.ndarray:
    """Relabel a copy-major moment vector (or square matrix) to site-major."""
    x = np.asarray(x)
    bits = 2 * k * n
    axes = site_major_axes(n, k)
    if x.ndim == 1:
        return x.reshape((2,) * bits).transpose(axes).reshape(-1)
    dim = x.shape[0]
    t = x.reshape((2,) * (2 * bits))
    t = t.transpose(axes + [bits + a for a in axes])
    return t.reshape(dim, dim)
