"""Smallest eigenvalue of a Hermitian operator off a known invariant subspace."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidArgument


@dataclass
class LanczosResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int


def _as_columns(basis, dim):
    if basis is None:
        return None
    b = np.asarray(basis)
    if b.size == 0:
        return None
    if b.ndim == 1:
        b = b[None, :]
    if b.shape[1] != dim:
        raise InvalidArgument(f"deflation vectors must have length {dim}, got {b.shape[1]}")
    return np.ascontiguousarray(b.T)


DEFAULT_BASIS = 40
SMALL_SPACE = 200


def default_max_iter(dim: int) -> int:
    return max(int(10 * math.sqrt(dim)), 20)


def lanczos_smallest(
    matvec,
    dim: int,
    deflation=None,
    tol: float = 1e-10,
    max_iter: int | None = None,
    seed: int = 0,
    dtype=np.float64,
    max_basis: int | None = None,
    keep: int = 10,
) -> LanczosResult:
    """Thick-restarted Lanczos for the lowest eigenpair on ``span(deflation)^perp``.

    Every new Krylov direction (and every product ``A v``) is re-projected
    against the deflation basis and fully reorthogonalised against the current
    basis, twice.  The projected matrix ``V^H A V`` is kept explicitly, so a
    restart simply rotates the basis onto the ``keep`` lowest Ritz vectors.
    Convergence: ``||A x - theta x|| <= tol * max|ritz values|``.

    By default the basis holds 40 vectors, or the whole complement when that
    has at most ``SMALL_SPACE`` dimensions (no restarts are then needed).
    """
    defl = _as_columns(deflation, dim)
    n_defl = 0 if defl is None else defl.shape[1]
    if defl is not None:
        gram = defl.conj().T @ defl
        if np.max(np.abs(gram - np.eye(n_defl))) > 1e-10:
            raise InvalidArgument("deflation basis is not orthonormal within 1e-10")
        if np.iscomplexobj(defl):
            dtype = np.result_type(dtype, np.complex128)
    space = dim - n_defl
    if space <= 0:
        raise InvalidArgument("deflation basis spans the whole space")
    if max_iter is None:
        max_iter = default_max_iter(dim)
    if max_basis is None:
        max_basis = space if space <= SMALL_SPACE else DEFAULT_BASIS
    max_basis = max(2, min(max_basis, space))
    keep = max(1, min(keep, max_basis - 1))

    def deflate(x):
        if defl is not None:
            x -= defl @ (defl.conj().T @ x)
        return x

    V = np.zeros((dim, max_basis), dtype=dtype)
    AV = np.zeros((dim, max_basis), dtype=dtype)
    T = np.zeros((max_basis, max_basis), dtype=dtype)
    m = 0

    gen = np.random.default_rng(seed)
    nxt = gen.standard_normal(dim).astype(dtype)
    if np.iscomplexobj(nxt):
        nxt = nxt + 1j * gen.standard_normal(dim)

    iterations = 0
    best = (math.nan, None, math.inf)
    while True:
        # orthogonalise the candidate direction
        w = deflate(np.array(nxt, dtype=dtype))
        for _ in range(2):
            if m:
                w -= V[:, :m] @ (V[:, :m].conj().T @ w)
            w = deflate(w)
        norm = np.linalg.norm(w)
        scale = max(np.linalg.norm(nxt), 1e-300)
        if norm > 1e-13 * scale and m < space:
            v = w / norm
            av = deflate(np.asarray(matvec(v), dtype=np.result_type(dtype, v.dtype)))
            iterations += 1
            V[:, m] = v
            AV[:, m] = av
            col = V[:, : m + 1].conj().T @ av
            T[: m + 1, m] = col
            T[m, : m + 1] = col.conj()
            m += 1
        elif m == 0:
            raise InvalidArgument("starting vector lies in the deflation span")

        theta, Y = np.linalg.eigh(T[:m, :m])
        y = Y[:, 0]
        x = V[:, :m] @ y
        r = AV[:, :m] @ y - theta[0] * x
        res = float(np.linalg.norm(r))
        ritz_scale = float(np.max(np.abs(theta)))
        best = (float(theta[0]), x, res)
        exhausted = norm <= 1e-13 * scale or m >= space
        if res <= tol * ritz_scale or (exhausted and res <= max(tol * ritz_scale, 1e-12)):
            return LanczosResult(float(theta[0]), x / np.linalg.norm(x), res, iterations)
        if exhausted or iterations >= max_iter:
            raise ConvergenceError(
                f"no convergence after {iterations} matvecs (residual {res:.3e})",
                estimate=best[0],
                residual=res,
                iterations=iterations,
            )
        if m == max_basis:
            Yk = Y[:, :keep]
            V[:, :keep] = V[:, :m] @ Yk
            AV[:, :keep] = AV[:, :m] @ Yk
            T[:] = 0
            T[np.arange(keep), np.arange(keep)] = theta[:keep]
            m = keep
        nxt = r


def smallest_eigenvalue_deflated(matvec, dim, deflation_basis=(), tol=1e-10, seed=0, **kwargs) -> float:
    return lanczos_smallest(matvec, dim, deflation_basis, tol=tol, seed=seed, **kwargs).value
