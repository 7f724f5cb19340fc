"""Dense linear-algebra kernels on tensor-product vectors.

Index convention (used everywhere in the package): a vector over ``n`` sites
of local dimension ``d`` has flat index ``i_1 d^{n-1} + ... + i_n``, i.e. site
1 is the most significant digit.  ``kron(a, b)`` follows the same ordering, so
``kron(op, I)`` acts on the leading site.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, InvalidArgument
from .rng import as_generator

#: Operators up to this dimension may be materialised densely.
DENSE_LIMIT = 4096
#: Hard cap on the entry count of a dense matrix built by :func:`kron`.
MAX_DENSE_ENTRIES = 1 << 28


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Sample a ``dim x dim`` unitary from the Haar measure.

    A complex Ginibre matrix is QR-factorised and the columns of ``Q`` are
    rephased so that ``R`` has a positive real diagonal; without that step the
    distribution of ``Q`` is not Haar.
    """
    if dim < 1:
        raise InvalidArgument(f"dim must be >= 1, got {dim}")
    gen = as_generator(rng)
    z = gen.standard_normal((dim, dim, 2))
    return _qr_haar(z[..., 0] + 1j * z[..., 1])


def haar_unitaries(dim: int, count: int, rng) -> np.ndarray:
    """``count`` independent Haar unitaries drawn from a single stream."""
    if dim < 1:
        raise InvalidArgument(f"dim must be >= 1, got {dim}")
    gen = as_generator(rng)
    z = gen.standard_normal((count, dim, dim, 2))
    return _qr_haar(z[..., 0] + 1j * z[..., 1])


def _qr_haar(ginibre):
    q, r = np.linalg.qr(ginibre)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    entries = a.size * b.size
    if entries > MAX_DENSE_ENTRIES:
        raise CapacityError(
            f"kron result has {entries} entries, above the cap {MAX_DENSE_ENTRIES}",
            dimension=entries,
            limit=MAX_DENSE_ENTRIES,
        )
    return np.kron(a, b)


def _num_sites(length: int, local_dim: int) -> int:
    n = 0
    size = 1
    while size < length:
        size *= local_dim
        n += 1
    if size != length:
        raise InvalidArgument(f"length {length} is not a power of local_dim {local_dim}")
    return n


def apply_local(op, site: int, state, local_dim: int = 2, out=None) -> np.ndarray:
    """Apply a two-site operator to sites ``(site, site + 1)``, 1-based.

    ``state`` has shape ``(local_dim**n,)`` or ``(local_dim**n, m)``; a trailing
    axis is treated as a batch of columns (so a whole matrix can be hit from
    the left).  Returns a new array unless ``out`` is given.
    """
    op = np.asarray(op)
    state = np.asarray(state)
    block = local_dim * local_dim
    if op.shape != (block, block):
        raise InvalidArgument(f"op must be {block}x{block}, got {op.shape}")
    n = _num_sites(state.shape[0], local_dim)
    if not 1 <= site <= n - 1:
        raise InvalidArgument(f"site must be in [1, {n - 1}], got {site}")
    left = local_dim ** (site - 1)
    right = local_dim ** (n - site - 1)
    batch = state.size // state.shape[0]
    x = state.reshape(left, block, right * batch)
    y = np.matmul(op, x)
    if out is not None:
        out.reshape(left, block, right * batch)[...] = y
        return out
    return y.reshape(state.shape)


def apply_pair(op, first: int, second: int, state, local_dim: int = 2) -> np.ndarray:
    """Apply a two-site operator to arbitrary sites ``first`` and ``second``.

    ``first`` is the more significant factor of ``op``.  The state is
    conjugated by the axis permutation that brings the two sites to the front,
    so no swap network is needed.
    """
    state = np.asarray(state)
    n = _num_sites(state.shape[0], local_dim)
    if first == second or not (1 <= first <= n and 1 <= second <= n):
        raise InvalidArgument(f"invalid site pair ({first}, {second}) for {n} sites")
    if second == first + 1:
        return apply_local(op, first, state, local_dim)
    extra = state.shape[1:]
    t = state.reshape((local_dim,) * n + extra)
    t = np.moveaxis(t, (first - 1, second - 1), (0, 1))
    moved_shape = t.shape
    t = np.matmul(np.asarray(op), t.reshape(local_dim * local_dim, -1))
    t = np.moveaxis(t.reshape(moved_shape), (0, 1), (first - 1, second - 1))
    return np.ascontiguousarray(t).reshape(state.shape)
