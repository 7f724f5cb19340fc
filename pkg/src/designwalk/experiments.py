"""Design-quality and equilibration experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circuits import EnsembleSpec, apply_circuit_state, ensemble_unitaries, sample_circuit
from .errors import CapacityError, InvalidArgument
from .gap import spectral_gap
from .moments import check_dense_moment, gnu_dense, haar_projector_dense, haar_projector_trace
from .rng import derive_seed
from .stats import bootstrap_se, quantiles

MAX_STATE_QUBITS = 14


@dataclass
class DesignErrorRow:
    t: int
    error: float
    predicted: float


@dataclass
class DesignErrorTable:
    n: int
    k: int
    delta: float
    rows: list[DesignErrorRow]


def operator_norm_sym(a) -> float:
    w = np.linalg.eigvalsh(a)
    return float(max(abs(w[0]), abs(w[-1])))


def design_error(n: int, k: int, t_list, delta: float | None = None) -> DesignErrorTable:
    """``||G_nu^t - G_Haar||`` (operator norm) by explicit matrix powers.

    ``predicted`` is ``(1 - delta)^t`` with ``delta`` from the gap solver
    unless supplied.
    """
    check_dense_moment(n, k)
    t_list = [int(t) for t in t_list]
    if any(t < 0 for t in t_list):
        raise InvalidArgument("depths must be non-negative")
    if delta is None:
        delta = spectral_gap(n, k).delta
    g = gnu_dense(n, k)
    haar = haar_projector_dense(n, k)
    power = np.eye(g.shape[0])
    current = 0
    errors = {}
    for t in sorted(set(t_list)):
        if t > current:
            power = power @ np.linalg.matrix_power(g, t - current)
            current = t
        errors[t] = operator_norm_sym(power - haar)
    rows = [DesignErrorRow(t, errors[t], (1 - delta) ** t) for t in t_list]
    return DesignErrorTable(n, k, delta, rows)


# -- frame potential ---------------------------------------------------------

@dataclass
class FramePotentialEstimate:
    spec: EnsembleSpec
    k: int
    samples: int
    value: float
    std_error: float


def haar_frame_potential(n: int, k: int) -> float:
    """Haar value of the frame potential: the trace (rank) of the Haar projector."""
    return haar_projector_trace(n, k, pinv=2**n < k)


def frame_potential(spec: EnsembleSpec, k: int, samples: int, threads: int | None = None) -> FramePotentialEstimate:
    """Mean of ``|tr(U^dag V)|^(2k)`` over independent pairs; pair ``j`` uses
    samples ``2j`` and ``2j + 1`` of the ensemble."""
    if samples < 1:
        raise InvalidArgument("need at least one pair")
    us = ensemble_unitaries(spec, 2 * samples, threads)
    tr = np.einsum("nij,nij->n", us[0::2].conj(), us[1::2])
    vals = np.abs(tr) ** (2 * k)
    return FramePotentialEstimate(spec, k, samples, float(vals.mean()), bootstrap_se(vals, seed=spec.seed))


# -- equilibration -----------------------------------------------------------

@dataclass(frozen=True)
class MeasurementSpec:
    """``M = V^dag (Pi_target (x) I) V``, with V a line-nn circuit of ``s`` gates
    and ``Pi`` the projector onto spin-up on every qubit in ``target`` (1-based)."""

    n: int
    s: int
    target: tuple[int, ...]
    seed: int

    def __post_init__(self):
        if self.s < 0:
            raise InvalidArgument("measurement complexity must be >= 0")
        if any(not 1 <= q <= self.n for q in self.target) or len(set(self.target)) != len(self.target):
            raise InvalidArgument(f"invalid target qubits {self.target} for n={self.n}")

    @property
    def trace_term(self) -> float:
        return 2.0 ** -len(self.target)

    @cached_property
    def circuit(self):
        return sample_circuit(EnsembleSpec(self.n, self.s, "line-nn", self.seed))


def measurement_family(n: int, s: int, count: int, seed: int, target=(1,)):
    """``count`` measurements of complexity ``s`` projecting on ``target``.

    ``target="random"`` draws one target qubit uniformly per measurement.
    """
    for j in range(count):
        mseed = derive_seed(seed, 0, j)
        if target == "random":
            gen = np.random.default_rng(derive_seed(mseed, 1))
            qubits = (int(gen.integers(n)) + 1,)
        else:
            qubits = tuple(target)
        yield MeasurementSpec(n, s, qubits, mseed)


def up_probability(state, target, n: int) -> float:
    """``||Pi_target state||^2 / ||state||^2`` (spin up = bit 0)."""
    probs = np.abs(np.asarray(state)) ** 2
    total = probs.sum()
    if not target:
        return float(total / total)
    t = probs.reshape((2,) * n)
    index = tuple(0 if q in target else slice(None) for q in range(1, n + 1))
    return float(t[index].sum() / total)


def deviation(state, meas: MeasurementSpec) -> float:
    """``|<state|M|state> - tr(M)/2^n|`` evaluated through ``V state``."""
    v_state = apply_circuit_state(meas.circuit, state)
    return abs(up_probability(v_state, meas.target, meas.n) - meas.trace_term)


@dataclass
class DeviationSample:
    t: int
    trial: int
    deviation: float
    trace_term: float
    seed: int

    COLUMNS = ("t", "trial", "deviation", "trace_term", "seed")

    def row(self) -> dict:
        return {"t": self.t, "trial": self.trial, "deviation": self.deviation,
                "trace_term": self.trace_term, "seed": self.seed}


@dataclass
class EquilibrationResult:
    n: int
    samples: list[DeviationSample]
    summary: list[dict]
    baseline: dict
    baseline_values: np.ndarray = field(repr=False, default=None)

    def medians(self) -> dict[int, float]:
        return {row["t"]: row["median"] for row in self.summary}


def gaussian_state(n: int, gen: np.random.Generator) -> np.ndarray:
    z = gen.standard_normal((2**n, 2))
    psi = z[:, 0] + 1j * z[:, 1]
    return psi / np.linalg.norm(psi)


def equilibration_experiment(n: int, t_list, trials: int, s: int = 20, seed: int = 0,
                             target=(1,), measurements=None) -> EquilibrationResult:
    """Deviation of ``U|up^n>`` from maximally mixed under low-complexity tests.

    Trial ``j`` pairs measurement ``j`` of the family with a fresh line-nn
    circuit of each depth.  The baseline replaces ``U|up^n>`` with normalised
    complex-Gaussian states, which are Haar distributed.
    """
    if n > MAX_STATE_QUBITS:
        raise CapacityError(f"statevector on {n} qubits exceeds the {MAX_STATE_QUBITS}-qubit budget",
                            dimension=2**n, limit=2**MAX_STATE_QUBITS, feasible=f"n <= {MAX_STATE_QUBITS}")
    if n < 2 or trials < 1:
        raise InvalidArgument("need n >= 2 and at least one trial")
    t_list = [int(t) for t in t_list]
    if measurements is None:
        measurements = list(measurement_family(n, s, trials, seed, target))
    else:
        measurements = list(measurements)
        if len(measurements) != trials:
            raise InvalidArgument("need one measurement per trial")
    up = np.zeros(2**n, dtype=np.complex128)
    up[0] = 1.0
    samples = []
    summary = []
    for ti, t in enumerate(t_list):
        devs = []
        for j, meas in enumerate(measurements):
            useed = derive_seed(seed, 1, ti, j)
            state = apply_circuit_state(sample_circuit(EnsembleSpec(n, t, "line-nn", useed)), up)
            d = deviation(state, meas)
            devs.append(d)
            samples.append(DeviationSample(t, j, d, meas.trace_term, useed))
        med, p90 = quantiles(devs)
        summary.append({"t": t, "median": med, "p90": p90, "mean": float(np.mean(devs))})
    base = []
    for j, meas in enumerate(measurements):
        psi = gaussian_state(n, np.random.default_rng(derive_seed(seed, 2, j)))
        base.append(abs(up_probability(psi, meas.target, n) - meas.trace_term))
    base = np.asarray(base)
    bmed, b90 = quantiles(base)
    return EquilibrationResult(n, samples, summary, {"median": bmed, "p90": b90}, base)
