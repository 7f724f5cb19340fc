"""Operators on the k-th moment space of n qubits.

States are flat arrays in the site-major layout described in
:mod:`designwalk.permutations` (length ``4^(k n)``); a trailing batch axis is
allowed.  ``n`` is inferred from the length.  All exact operators here are real
symmetric in that layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuits import EnsembleSpec, ensemble_unitaries
from .errors import CapacityError, DegenerateGramError, InvalidArgument
from .permutations import (
    copy_to_site_major,
    gram_matrix,
    pair_vectors,
    permutations,
    product_vectors,
)
from .stats import bootstrap_se
from .rng import RngStream
from .tensor import DENSE_LIMIT, haar_unitaries

GRAM_COND_LIMIT = 1e12
PINV_RCOND = 1e-12


def invert_gram(w, pinv: bool = False) -> np.ndarray:
    """Inverse of a Gram matrix, guarded by a condition-number check.

    With ``pinv=True`` singular values below ``1e-12 * max`` are dropped
    instead, giving the projector onto the span of dependent vectors.
    """
    if pinv:
        return np.linalg.pinv(w, rcond=PINV_RCOND, hermitian=True)
    cond = np.linalg.cond(w)
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        raise DegenerateGramError(
            f"Gram matrix condition number {cond:.3g} exceeds {GRAM_COND_LIMIT:.0e}; "
            "use pseudoinverse mode"
        )
    return np.linalg.inv(w)


def moment_sites(length: int, k: int) -> int:
    d = 4**k
    n, size = 0, 1
    while size < length:
        size *= d
        n += 1
    if size != length or n < 1:
        raise InvalidArgument(f"length {length} is not a power of 4^{k}")
    return n


def check_dense_moment(n: int, k: int):
    dim = 4 ** (k * n)
    if dim > DENSE_LIMIT:
        raise CapacityError(
            f"dense moment operator for n={n}, k={k} has dimension {dim} > {DENSE_LIMIT}",
            dimension=dim,
            limit=DENSE_LIMIT,
            feasible=f"n <= {max(1, (DENSE_LIMIT.bit_length() - 1) // (2 * k))} at k={k}",
        )


@lru_cache(maxsize=None)
def _pair_basis(k: int):
    phi = pair_vectors(k)
    winv = invert_gram(gram_matrix(k, 4), pinv=4 < k)
    return phi, winv


@lru_cache(maxsize=None)
def _global_basis(n: int, k: int, pinv: bool):
    return product_vectors(n, k), invert_gram(gram_matrix(k, 2**n), pinv=pinv)


def local_projector_dense(k: int) -> np.ndarray:
    """Haar twirl of one two-qubit gate, a ``16^k`` square projector."""
    phi, winv = _pair_basis(k)
    return phi.T @ winv @ phi


def local_moment_projector_apply(state, site: int, k: int) -> np.ndarray:
    """Apply ``P_{site, site+1}`` (1-based) without materialising it."""
    state = np.asarray(state)
    n = moment_sites(state.shape[0], k)
    if not 1 <= site <= n - 1:
        raise InvalidArgument(f"site must be in [1, {n - 1}], got {site}")
    phi, winv = _pair_basis(k)
    block = 16**k
    left = 4 ** (k * (site - 1))
    x = state.reshape(left, block, -1)
    coeff = np.matmul(phi, x)
    y = np.matmul(phi.T, np.matmul(winv, coeff))
    return y.reshape(state.shape)


def gnu_apply(state, k: int) -> np.ndarray:
    """One step of the walk: the uniform average of the local projectors."""
    state = np.asarray(state)
    n = moment_sites(state.shape[0], k)
    if n < 2:
        raise InvalidArgument("the walk needs at least 2 qubits")
    acc = local_moment_projector_apply(state, 1, k)
    for site in range(2, n):
        acc += local_moment_projector_apply(state, site, k)
    return acc / (n - 1)


def haar_projector_apply(state, k: int, pinv: bool = False) -> np.ndarray:
    """Orthogonal projection onto ``span{psi_sigma^(x)n}``."""
    state = np.asarray(state)
    n = moment_sites(state.shape[0], k)
    phi, winv = _global_basis(n, k, pinv)
    flat = state.reshape(state.shape[0], -1)
    out = phi.T @ (winv @ (phi @ flat))
    return out.reshape(state.shape)


def haar_projector_dense(n: int, k: int, pinv: bool = False) -> np.ndarray:
    check_dense_moment(n, k)
    phi, winv = _global_basis(n, k, pinv)
    return phi.T @ winv @ phi


def haar_projector_trace(n: int, k: int, pinv: bool = False) -> float:
    """``tr G_Haar`` from the Gram matrix alone (= k! when 2^n >= k)."""
    w = gram_matrix(k, 2**n)
    return float(np.trace(invert_gram(w, pinv) @ w))


def gnu_dense(n: int, k: int) -> np.ndarray:
    check_dense_moment(n, k)
    p = local_projector_dense(k)
    d = 4**k
    g = np.zeros((d**n, d**n))
    for site in range(1, n):
        left = np.eye(d ** (site - 1))
        right = np.eye(d ** (n - site - 1))
        g += np.kron(np.kron(left, p), right)
    return g / (n - 1)


# -- Monte-Carlo moment estimates --------------------------------------------

@dataclass
class MomentEstimate:
    mean: np.ndarray
    std_error: float
    samples: int


@dataclass
class Estimate:
    value: complex
    std_error: float
    samples: int


@dataclass(frozen=True)
class HaarEnsemble:
    """Exact Haar measure on ``n_qubits`` qubits (no sampling)."""

    n_qubits: int


def tensor_power(u, k: int) -> np.ndarray:
    """Batched ``U^{(x)k}`` for a stack of square matrices."""
    u = np.asarray(u)
    y = u
    for _ in range(k - 1):
        b, r, c = y.shape
        d = u.shape[1]
        y = np.einsum("nij,nkl->nikjl", y, u).reshape(b, r * d, c * d)
    return y


def moment_mean(unitaries, k: int, chunk: int = 500) -> MomentEstimate:
    """Mean of ``U^{(x)k} (x) conj(U)^{(x)k}`` over a stack, site-major.

    With ``Y = U^{(x)k}`` the summand is ``Y (x) conj(Y)``, whose entries are
    the products ``Y[a, c] conj(Y[b, d])``; summing them is one Gram product of
    the vectorised ``Y``.  The reported standard error is the Frobenius norm
    of the bootstrap standard error, evaluated in closed form from
    ``||X_i||_F^2 = d^{2k}``.
    """
    unitaries = np.asarray(unitaries)
    count, d, _ = unitaries.shape
    n = d.bit_length() - 1
    dk = d**k
    acc = np.zeros((dk * dk, dk * dk), dtype=np.complex128)
    for start in range(0, count, chunk):
        a = tensor_power(unitaries[start:start + chunk], k).reshape(-1, dk * dk)
        acc += a.T @ a.conj()
    x = acc.reshape(dk, dk, dk, dk).transpose(0, 2, 1, 3).reshape(dk * dk, dk * dk) / count
    mean = copy_to_site_major(x, n, k)
    frob2 = float(np.vdot(mean, mean).real)
    var = max(float(dk * dk) - frob2, 0.0) / count
    return MomentEstimate(mean, float(np.sqrt(var)), count)


def g_mu_estimate(spec: EnsembleSpec, k: int, samples: int, threads: int | None = None) -> MomentEstimate:
    """Dense Monte-Carlo estimate of the moment operator of ``spec``."""
    check_dense_moment(spec.n_qubits, k)
    if samples < 1:
        raise InvalidArgument("need at least one sample")
    us = ensemble_unitaries(spec, samples, threads)
    return moment_mean(us, k)


def haar_moment_mean(k: int, samples: int, seed: int = 0) -> MomentEstimate:
    """Dense Monte-Carlo average over Haar 4x4 unitaries (the integral defining P)."""
    us = haar_unitaries(4, samples, RngStream(seed))
    return moment_mean(us, k)


def _check_monomial(k, d, *index_lists):
    for idx in index_lists:
        if len(idx) != k:
            raise InvalidArgument(f"each index list needs length k={k}")
        for i in idx:
            if not 0 <= i < d:
                raise InvalidArgument(f"index {i} out of range [0, {d})")


def _haar_vector_entry(sigma, ket, bra, q, k):
    if all(ket[s] == bra[c] for c, s in enumerate(sigma)):
        return q ** (-k / 2)
    return 0.0


def haar_monomial(n: int, k: int, rows, cols, conj_rows, conj_cols, pinv: bool = False) -> float:
    """Exact Haar average of ``prod U[rows, cols] * prod conj(U[conj_rows, conj_cols])``.

    This is the ``((rows, conj_rows), (cols, conj_cols))`` element of the Haar
    projector in the copy-major layout.
    """
    q = 2**n
    _check_monomial(k, q, rows, cols, conj_rows, conj_cols)
    perms = permutations(k)
    winv = invert_gram(gram_matrix(k, q), pinv)
    left = np.array([_haar_vector_entry(s, rows, conj_rows, q, k) for s in perms])
    right = np.array([_haar_vector_entry(s, cols, conj_cols, q, k) for s in perms])
    return float(left @ winv @ right)


def monomial_values(unitaries, rows, cols, conj_rows, conj_cols) -> np.ndarray:
    u = np.asarray(unitaries)
    vals = np.ones(u.shape[0], dtype=np.complex128)
    for i, j in zip(rows, cols):
        vals = vals * u[:, i, j]
    for m, c in zip(conj_rows, conj_cols):
        vals = vals * np.conj(u[:, m, c])
    return vals


def moment_monomial_avg(source, k: int, rows, cols, conj_rows, conj_cols,
                        samples: int = 1000, threads: int | None = None, unitaries=None) -> Estimate:
    """Average of a degree-(k, k) monomial in the entries of U.

    ``source`` is an :class:`EnsembleSpec` (Monte-Carlo mean with bootstrap
    standard error) or a :class:`HaarEnsemble` (exact, zero error).  Indices
    are 0-based.  Precomputed ``unitaries`` for the ensemble may be passed to
    evaluate many monomials on one sample set.
    """
    n = source.n_qubits
    _check_monomial(k, 2**n, rows, cols, conj_rows, conj_cols)
    if isinstance(source, HaarEnsemble):
        return Estimate(complex(haar_monomial(n, k, rows, cols, conj_rows, conj_cols)), 0.0, 0)
    if unitaries is None:
        unitaries = ensemble_unitaries(source, samples, threads)
    vals = monomial_values(unitaries, rows, cols, conj_rows, conj_cols)
    return Estimate(complex(vals.mean()), bootstrap_se(vals, seed=source.seed), len(vals))
