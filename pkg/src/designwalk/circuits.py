"""Random two-qubit-gate circuits: sampling, dense unitaries, statevector runs.

Qubits are numbered from 1 (most significant tensor factor) to ``n``.  A
gate with ``site = i`` acts on qubits ``i, i + 1`` unless ``partner`` names a
different second qubit (all-pairs topology).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CapacityError, InvalidArgument
from .parallel import chunked_map
from .rng import RngStream, as_generator, derive_seed
from .tensor import DENSE_LIMIT, _qr_haar, apply_pair, haar_unitary

TOPOLOGIES = ("line-nn", "all-pairs", "brickwork")


@dataclass(frozen=True)
class PlacedGate:
    site: int
    matrix: np.ndarray = field(repr=False)
    partner: int | None = None

    @property
    def qubits(self) -> tuple[int, int]:
        return (self.site, self.site + 1 if self.partner is None else self.partner)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[PlacedGate, ...] = ()
    topology: str = "line-nn"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            a, b = g.qubits
            if a == b or not (1 <= a <= self.n_qubits and 1 <= b <= self.n_qubits):
                raise InvalidArgument(f"gate on qubits {g.qubits} invalid for n={self.n_qubits}")

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise InvalidArgument("cannot concatenate circuits on different qubit counts")
        return Circuit(self.n_qubits, self.gates + other.gates, self.topology)


@dataclass(frozen=True)
class EnsembleSpec:
    n_qubits: int
    depth: int
    topology: str = "line-nn"
    seed: int = 0

    def __post_init__(self):
        if self.n_qubits < 2:
            raise InvalidArgument(f"n_qubits must be >= 2, got {self.n_qubits}")
        if self.depth < 0:
            raise InvalidArgument(f"depth must be >= 0, got {self.depth}")
        if self.topology not in TOPOLOGIES:
            raise InvalidArgument(f"unknown topology {self.topology!r}; choose from {TOPOLOGIES}")

    def with_seed(self, seed: int) -> "EnsembleSpec":
        return EnsembleSpec(self.n_qubits, self.depth, self.topology, seed)


def sample_step(n: int, rng) -> PlacedGate:
    """One step of the nearest-neighbour walk: uniform site, Haar gate."""
    if n < 2:
        raise InvalidArgument(f"need at least 2 qubits, got {n}")
    gen = as_generator(rng)
    site = int(gen.integers(1, n))
    return PlacedGate(site, haar_unitary(4, gen))


def brickwork_sites(n: int, t: int) -> list[int]:
    """Sites of the first ``t`` gates of alternating odd/even layers."""
    layers = (list(range(1, n, 2)), list(range(2, n, 2)))
    sites: list[int] = []
    layer = 0
    while len(sites) < t:
        sites.extend(layers[layer % 2])
        layer += 1
    return sites[:t]


def sample_circuit(spec: EnsembleSpec) -> Circuit:
    """Draw a circuit; gate ``g`` uses the stream ``(spec.seed, g)``.

    Each stream yields the site (when random) and then the Ginibre matrix, in
    the same order as :func:`sample_step`; the QR step is batched.
    """
    n, t = spec.n_qubits, spec.depth
    if t == 0:
        return Circuit(n, (), spec.topology, spec.seed)
    if spec.topology == "brickwork":
        sites = brickwork_sites(n, t)
        partners = [None] * t
    else:
        pairs = list(combinations(range(1, n + 1), 2))
        sites, partners = [], []
    ginibre = np.empty((t, 4, 4, 2))
    for g in range(t):
        gen = RngStream(spec.seed, g).generator()
        if spec.topology == "line-nn":
            sites.append(int(gen.integers(1, n)))
            partners.append(None)
        elif spec.topology == "all-pairs":
            a, b = pairs[int(gen.integers(len(pairs)))]
            sites.append(a)
            partners.append(None if b == a + 1 else b)
        ginibre[g] = gen.standard_normal((4, 4, 2))
    mats = _qr_haar(ginibre[..., 0] + 1j * ginibre[..., 1])
    gates = tuple(PlacedGate(sites[g], mats[g], partners[g]) for g in range(t))
    return Circuit(n, gates, spec.topology, spec.seed)


def _check_dense(n):
    if 2**n > DENSE_LIMIT:
        raise CapacityError(
            f"circuit unitary on {n} qubits has dimension {2**n} > {DENSE_LIMIT}",
            dimension=2**n,
            limit=DENSE_LIMIT,
            feasible=f"n <= {DENSE_LIMIT.bit_length() - 1}",
        )


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense ``U = U_t ... U_2 U_1`` (last gate leftmost)."""
    _check_dense(c.n_qubits)
    u = np.eye(2**c.n_qubits, dtype=np.complex128)
    for g in c.gates:
        u = apply_pair(g.matrix, *g.qubits, u)
    return u


def apply_circuit_state(c: Circuit, state) -> np.ndarray:
    state = np.asarray(state, dtype=np.complex128)
    if state.shape[0] != 2**c.n_qubits:
        raise InvalidArgument(f"state length {state.shape[0]} != 2^{c.n_qubits}")
    out = state.copy()
    for g in c.gates:
        out = apply_pair(g.matrix, *g.qubits, out)
    return out


def sample_seed(spec: EnsembleSpec, index: int) -> int:
    return derive_seed(spec.seed, index)


def _unitary_chunk(start, stop, spec):
    return np.stack([circuit_unitary(sample_circuit(spec.with_seed(sample_seed(spec, j))))
                     for j in range(start, stop)])


def ensemble_unitaries(spec: EnsembleSpec, samples: int, threads: int | None = None, offset: int = 0) -> np.ndarray:
    """Stack of dense unitaries for samples ``offset .. offset + samples - 1``.

    Sample ``j`` is the circuit drawn from ``spec`` reseeded with
    ``derive_seed(spec.seed, j)``.
    """
    _check_dense(spec.n_qubits)
    if samples == 0:
        d = 2**spec.n_qubits
        return np.empty((0, d, d), dtype=np.complex128)
    parts = chunked_map(_unitary_chunk_offset, samples, threads, args=(spec, offset))
    return np.concatenate(parts)


def _unitary_chunk_offset(start, stop, spec, offset):
    return _unitary_chunk(start + offset, stop + offset, spec)


# -- serialisation -----------------------------------------------------------

def circuit_to_dict(c: Circuit) -> dict:
    gates = []
    for g in c.gates:
        entry = {
            "site": g.site,
            "matrix": [[float(z.real), float(z.imag)] for z in np.asarray(g.matrix).ravel()],
        }
        if g.partner is not None:
            entry["partner"] = g.partner
        gates.append(entry)
    return {"n": c.n_qubits, "topology": c.topology, "seed": c.seed, "t": len(c.gates), "gates": gates}


def circuit_from_dict(d: dict) -> Circuit:
    gates = []
    for entry in d["gates"]:
        pairs = np.asarray(entry["matrix"], dtype=np.float64)
        if pairs.shape != (16, 2):
            raise InvalidArgument("gate matrix must hold 16 (re, im) pairs")
        m = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(4, 4)
        gates.append(PlacedGate(int(entry["site"]), m, entry.get("partner")))
    if len(gates) != d.get("t", len(gates)):
        raise InvalidArgument("gate count does not match t")
    return Circuit(int(d["n"]), tuple(gates), d.get("topology", "line-nn"), d.get("seed"))


def circuit_to_json(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c))


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
