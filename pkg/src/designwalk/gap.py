"""The frustration-free Hamiltonian of the walk and its spectral gap."""

from __future__ import annotations

import math
import statistics
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .eigen import lanczos_smallest
from .errors import CapacityError, DegenerateGramError, InvalidArgument
from .moments import GRAM_COND_LIMIT, gnu_dense, local_moment_projector_apply
from .permutations import gram_matrix, product_vectors
from .tensor import DENSE_LIMIT

#: Largest moment-space dimension the gap routines will touch by default.
MAX_MOMENT_DIM = 1 << 20


@dataclass(frozen=True)
class HamiltonianHnk:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 2 or self.k < 1:
            raise InvalidArgument(f"need n >= 2 and k >= 1, got n={self.n}, k={self.k}")

    @property
    def dim(self) -> int:
        return 4 ** (self.k * self.n)

    def matvec(self, state):
        return h_apply(self, state)


def h_apply(h: HamiltonianHnk, state) -> np.ndarray:
    """``sum_i (state - P_i state)``."""
    state = np.asarray(state)
    if state.shape[0] != h.dim:
        raise InvalidArgument(f"state length {state.shape[0]} != {h.dim}")
    out = (h.n - 1) * state
    for site in range(1, h.n):
        out = out - local_moment_projector_apply(state, site, h.k)
    return out


def hamiltonian_dense(n: int, k: int) -> np.ndarray:
    g = gnu_dense(n, k)
    return (n - 1) * (np.eye(g.shape[0]) - g)


def _check_nk(n, k):
    if n < 2 or k < 1:
        raise InvalidArgument(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    if 2**n < k:
        raise InvalidArgument(f"2^n = {2**n} < k = {k}: permutation vectors are dependent")


def _check_capacity(n, k, max_dim):
    dim = 4 ** (k * n)
    if dim > max_dim:
        n_max = max(1, (max_dim.bit_length() - 1) // (2 * k))
        raise CapacityError(
            f"moment space for n={n}, k={k} has dimension (4^{k})^{n} = {dim} > {max_dim}",
            dimension=dim,
            limit=max_dim,
            feasible=f"n <= {n_max} at k={k}",
        )


def ground_space_basis(n: int, k: int) -> np.ndarray:
    """Orthonormal rows spanning the ground space, via ``W^{-1/2}``."""
    _check_nk(n, k)
    w = gram_matrix(k, 2**n)
    evals, evecs = np.linalg.eigh(w)
    if evals[0] <= 0 or evals[-1] / evals[0] > GRAM_COND_LIMIT:
        raise DegenerateGramError(f"Gram matrix for n={n}, k={k} is degenerate")
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.T
    return inv_sqrt @ product_vectors(n, k)


@dataclass
class GapReport:
    n: int
    k: int
    gap: float
    delta: float
    solver: str
    residual: float
    seed: int
    wall_time: float
    iterations: int = 0

    COLUMNS = ("n", "k", "delta_gap", "delta_walk", "solver", "residual", "seed", "wall_time")

    def row(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "delta_gap": self.gap,
            "delta_walk": self.delta,
            "solver": self.solver,
            "residual": self.residual,
            "seed": self.seed,
            "wall_time": self.wall_time,
        }


def spectral_gap(n: int, k: int, tol: float = 1e-10, solver: str = "auto", seed: int = 0,
                 max_dim: int = MAX_MOMENT_DIM, **solver_kwargs) -> GapReport:
    """Smallest nonzero eigenvalue of ``H_{n,k}``.

    ``solver="auto"`` diagonalises densely up to dimension 4096 and otherwise
    runs deflated Lanczos against :func:`ground_space_basis`.
    """
    _check_nk(n, k)
    _check_capacity(n, k, max_dim)
    if solver not in ("auto", "dense", "iterative"):
        raise InvalidArgument(f"unknown solver {solver!r}")
    dim = 4 ** (k * n)
    if solver == "auto":
        solver = "dense" if dim <= DENSE_LIMIT else "iterative"
    start = time.perf_counter()
    iterations = 0
    if solver == "dense":
        h = hamiltonian_dense(n, k)
        ground = math.factorial(k)
        evals, evecs = scipy.linalg.eigh(h, subset_by_index=[0, ground])
        if abs(evals[ground - 1]) > 1e-8:
            raise DegenerateGramError(f"ground space of H_{n},{k} is smaller than {ground}")
        gap = float(evals[ground])
        v = evecs[:, ground]
        residual = float(np.linalg.norm(h @ v - gap * v))
    else:
        ham = HamiltonianHnk(n, k)
        res = lanczos_smallest(ham.matvec, dim, ground_space_basis(n, k), tol=tol, seed=seed,
                               **solver_kwargs)
        gap, residual, iterations = res.value, res.residual, res.iterations
    wall = time.perf_counter() - start
    return GapReport(n, k, gap, gap / (n - 1), solver, residual, seed, wall, iterations)


def delta(report: GapReport) -> float:
    return report.gap / (report.n - 1)


@dataclass
class DesignDepth:
    n: int
    k: int
    eps: float
    t: int
    delta: float


def depth_from_delta(delta_walk: float, eps: float) -> int:
    """``ceil(ln(1/eps) / delta)``, ignoring round-off just above an integer."""
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    if delta_walk <= 0:
        raise InvalidArgument("delta must be positive")
    x = math.log(1 / eps) / delta_walk
    return max(0, math.ceil(x - 1e-9 * max(1.0, x)))


def design_depth(n: int, k: int, eps: float, **gap_kwargs) -> DesignDepth:
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    d = spectral_gap(n, k, **gap_kwargs).delta
    return DesignDepth(n, k, eps, depth_from_delta(d, eps), d)


# -- block-size gap inequality ---------------------------------------------------

def default_block_size(k: int, log_base: float = 2.0) -> int:
    """``ceil(2.5 log(4k))``; base 2 unless overridden."""
    return math.ceil(2.5 * math.log(4 * k, log_base) - 1e-12)


def largest_feasible_n(k: int, max_dim: int = MAX_MOMENT_DIM) -> int:
    n = 1
    while 4 ** (k * (n + 1)) <= max_dim:
        n += 1
    return n


@dataclass
class NachtergaeleRow:
    n: int
    gap_n: float
    gap_m: float
    bound: float
    ratio: float
    holds: bool


@dataclass
class NachtergaeleReport:
    k: int
    m: int
    m_default: int
    reduced: bool
    rows: list[NachtergaeleRow] = field(default_factory=list)
    warning: str | None = None

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows)


def nachtergaele_check(k: int, m: int | None = None, n_list=None, log_base: float = 2.0,
                       max_dim: int = MAX_MOMENT_DIM, tol: float = 1e-10, seed: int = 0) -> NachtergaeleReport:
    """Check ``gap(H_n) >= gap(H_m) / (4 m)`` for every ``n`` in ``n_list``.

    Without an explicit ``m`` the block size ``ceil(2.5 log(4k))`` is used if
    its Hamiltonian fits in ``max_dim``; otherwise the largest feasible block
    is substituted and a warning recorded.
    """
    m_default = default_block_size(k, log_base)
    n_top = largest_feasible_n(k, max_dim)
    warning = None
    if m is None:
        m = m_default
        if m >= n_top:
            m = max(2, n_top - 1)
            warning = (f"block size {m_default} is beyond capacity (largest n = {n_top} at k={k}); "
                       f"using m = {m}")
            warnings.warn(warning, RuntimeWarning, stacklevel=2)
    if n_list is None:
        n_list = list(range(m + 1, n_top + 1))
    n_list = list(n_list)
    if not n_list:
        raise CapacityError(f"no n > m = {m} is feasible at k={k}", feasible=f"n <= {n_top}")
    if m >= min(n_list):
        raise InvalidArgument(f"m = {m} must be smaller than every n in {n_list}")
    for n in [m] + n_list:
        if 4 ** (k * n) > max_dim:
            raise CapacityError(
                f"H_{n},{k} exceeds the budget {max_dim}; feasible frontier: n <= {n_top} at k={k}",
                dimension=4 ** (k * n), limit=max_dim, feasible=f"n <= {n_top}")
    gap_m = spectral_gap(m, k, tol=tol, seed=seed, max_dim=max_dim).gap
    bound = gap_m / (4 * m)
    rows = []
    for n in n_list:
        g = spectral_gap(n, k, tol=tol, seed=seed, max_dim=max_dim).gap
        rows.append(NachtergaeleRow(n, g, gap_m, bound, g / bound, g >= bound))
    return NachtergaeleReport(k, m, m_default, m != m_default, rows, warning)


@dataclass
class ScalingTable:
    k: int
    rows: list[tuple[int, float, float]]
    median: float
    consistent: bool

    @property
    def all_positive(self) -> bool:
        return all(d > 0 for _, d, _ in self.rows)


def scaling_check(k: int, n_range, factor: float = 2.0, **gap_kwargs) -> ScalingTable:
    """Table of ``(n, delta, n * delta)`` and whether ``n * delta`` stays
    within ``factor`` of its median across the range."""
    rows = []
    for n in n_range:
        d = spectral_gap(n, k, **gap_kwargs).delta
        rows.append((n, d, n * d))
    scaled = [r[2] for r in rows]
    med = statistics.median(scaled)
    consistent = all(d > 0 for _, d, _ in rows) and all(med / factor <= s <= med * factor for s in scaled)
    return ScalingTable(k, rows, med, consistent)
