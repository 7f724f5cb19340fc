import numpy as np
import pytest

from designwalk.circuits import EnsembleSpec, ensemble_unitaries
from designwalk.errors import CapacityError, DegenerateGramError, InvalidArgument
from designwalk.moments import (
    HaarEnsemble,
    g_mu_estimate,
    gnu_apply,
    gnu_dense,
    haar_moment_mean,
    haar_monomial,
    haar_projector_apply,
    haar_projector_dense,
    haar_projector_trace,
    local_moment_projector_apply,
    local_projector_dense,
    moment_mean,
    moment_monomial_avg,
    tensor_power,
)
from designwalk.permutations import copy_to_site_major, pair_vectors, product_vectors, site_vectors
from designwalk.rng import RngStream
from designwalk.tensor import haar_unitaries

from conftest import random_state


def test_local_projector_k1_rank_and_fixed_point():
    p = local_projector_dense(1)
    assert np.linalg.matrix_rank(p) == 1
    v = pair_vectors(1)[0]
    assert np.max(np.abs(local_moment_projector_apply(v, 1, 1) - v)) <= 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_local_projector_is_orthogonal_projector(k):
    p = local_projector_dense(k)
    assert np.linalg.norm(p @ p - p) <= 1e-10
    assert np.linalg.norm(p - p.T) <= 1e-10
    assert abs(np.trace(p) - (1 if k == 1 else 2)) <= 1e-10


@pytest.mark.parametrize("k", [1, 2])
def test_defining_integral(k):
    # Monte-Carlo average of U^(x)k (x) conj(U)^(x)k over Haar 4x4 unitaries
    est = haar_moment_mean(k, 10_000, seed=17)
    dist = np.linalg.norm(est.mean - local_projector_dense(k))
    assert dist <= 3 * est.std_error


def test_moment_mean_direct_summation():
    # GEMM route against an explicit kron average on a small stack
    us = haar_unitaries(4, 7, RngStream(3))
    k = 2
    ref = np.zeros((256, 256), dtype=complex)
    for u in us:
        y = np.kron(u, u)
        ref += np.kron(y, y.conj())
    ref = copy_to_site_major(ref / 7, 2, k)
    assert np.max(np.abs(moment_mean(us, k).mean - ref)) <= 1e-12


def test_tensor_power():
    us = haar_unitaries(2, 3, RngStream(1))
    assert np.allclose(tensor_power(us, 3)[1], np.kron(np.kron(us[1], us[1]), us[1]), atol=1e-14)


@pytest.mark.parametrize("k", [1, 2])
def test_local_apply_matches_dense_embedding(rng, k):
    n = 3 if k == 1 else 2
    state = random_state(rng, 4 ** (k * n))
    p = local_projector_dense(k)
    d = 4**k
    for site in range(1, n):
        dense = np.kron(np.kron(np.eye(d ** (site - 1)), p), np.eye(d ** (n - site - 1)))
        assert np.max(np.abs(local_moment_projector_apply(state, site, k) - dense @ state)) <= 1e-12


def test_local_apply_idempotent(rng):
    state = random_state(rng, 4**4)
    once = local_moment_projector_apply(state, 2, 1)
    assert np.max(np.abs(local_moment_projector_apply(once, 2, 1) - once)) <= 1e-10
    state = random_state(rng, 16**2)
    once = local_moment_projector_apply(state, 1, 2)
    assert np.max(np.abs(local_moment_projector_apply(once, 1, 2) - once)) <= 1e-10
    with pytest.raises(InvalidArgument):
        local_moment_projector_apply(state, 2, 2)


def test_gnu_two_qubits_is_single_projector(rng):
    state = random_state(rng, 256)
    assert np.array_equal(gnu_apply(state, 2), local_moment_projector_apply(state, 1, 2))


def test_gnu_fixes_product_vectors():
    for v in product_vectors(3, 2):
        assert np.max(np.abs(gnu_apply(v, 2) - v)) <= 1e-10


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2)])
def test_gnu_dense_properties(n, k):
    g = gnu_dense(n, k)
    h = haar_projector_dense(n, k)
    assert np.max(np.abs(g - g.T)) <= 1e-10
    w = np.linalg.eigvalsh(g)
    assert w.min() >= -1e-10 and w.max() <= 1 + 1e-10
    assert np.max(np.abs(h @ g - h)) <= 1e-10
    assert np.max(np.abs(g @ h - h)) <= 1e-10


def test_gnu_apply_matches_dense(rng):
    state = random_state(rng, 4**4)
    assert np.max(np.abs(gnu_apply(state, 1) - gnu_dense(4, 1) @ state)) <= 1e-12


def test_haar_projector_single_site():
    g = haar_projector_dense(1, 1)
    v = site_vectors(1)[0]
    assert np.max(np.abs(g - np.outer(v, v))) <= 1e-15


@pytest.mark.parametrize("n,k,rank", [(2, 1, 1), (3, 2, 2), (2, 3, 6)])
def test_haar_projector_dense(n, k, rank):
    g = haar_projector_dense(n, k)
    assert np.linalg.norm(g @ g - g) <= 1e-10
    assert np.linalg.norm(g - g.T) <= 1e-10
    assert abs(np.trace(g) - rank) <= 1e-8
    for psi in product_vectors(n, k):
        assert np.max(np.abs(g @ psi - psi)) <= 1e-10


def test_haar_apply_matches_dense(rng):
    state = random_state(rng, 4**6, batch=2)
    assert np.max(np.abs(haar_projector_apply(state, 2) - haar_projector_dense(3, 2) @ state)) <= 1e-12


def test_degenerate_gram_and_pinv():
    # three copies on one qubit: the six permutation vectors span only 5 dims
    with pytest.raises(DegenerateGramError):
        haar_projector_dense(1, 3)
    g = haar_projector_dense(1, 3, pinv=True)
    assert np.linalg.norm(g @ g - g) <= 1e-10
    assert abs(np.trace(g) - 5) <= 1e-8
    assert abs(haar_projector_trace(1, 3, pinv=True) - 5) <= 1e-8
    assert abs(haar_projector_trace(3, 3) - 6) <= 1e-8


def test_capacity_guard():
    with pytest.raises(CapacityError):
        gnu_dense(4, 2)
    with pytest.raises(CapacityError):
        g_mu_estimate(EnsembleSpec(4, 1, "line-nn", 0), 2, 10)


def test_g_mu_t0_is_identity():
    est = g_mu_estimate(EnsembleSpec(2, 0, "line-nn", 1), 2, 5)
    assert np.array_equal(est.mean, np.eye(256))


def test_g_mu_one_step():
    est = g_mu_estimate(EnsembleSpec(3, 1, "line-nn", 2), 1, 10_000)
    assert np.linalg.norm(est.mean - gnu_dense(3, 1)) <= 3 * est.std_error


def test_g_mu_deep_circuit():
    est = g_mu_estimate(EnsembleSpec(3, 100, "line-nn", 3), 1, 10_000)
    assert np.linalg.norm(est.mean - haar_projector_dense(3, 1)) <= 3 * est.std_error


@pytest.mark.parametrize("k", [1, 2])
def test_g_mu_distance_non_increasing(k):
    haar = haar_projector_dense(3, k)
    samples = 400 if k == 1 else 150
    prev = None
    for t in (0, 1, 3, 10, 30):
        est = g_mu_estimate(EnsembleSpec(3, t, "line-nn", 40 + t), k, samples)
        dist = np.linalg.norm(est.mean - haar)
        if prev is not None:
            assert dist <= prev[0] + 3 * max(prev[1], est.std_error)
        prev = (dist, est.std_error)


def test_standard_error_matches_bootstrap():
    # closed form for the Frobenius bootstrap error vs an explicit resample
    us = haar_unitaries(4, 400, RngStream(8))
    est = moment_mean(us, 1)
    gen = np.random.default_rng(0)
    xs = np.stack([np.kron(u, u.conj()) for u in us])
    means = np.stack([xs[gen.integers(0, 400, 400)].mean(axis=0) for _ in range(1000)])
    spread = np.sqrt(np.mean(np.sum(np.abs(means - means.mean(axis=0)) ** 2, axis=(1, 2))))
    assert est.std_error == pytest.approx(spread, rel=0.1)


def test_monomial_examples():
    ident = EnsembleSpec(2, 0, "line-nn", 0)
    assert moment_monomial_avg(ident, 1, [0], [0], [0], [0], samples=3).value == 1
    haar = HaarEnsemble(2)
    assert moment_monomial_avg(haar, 1, [0], [0], [0], [0]).value == pytest.approx(0.25, abs=1e-15)
    assert moment_monomial_avg(haar, 1, [0], [0], [1], [1]).value == 0
    with pytest.raises(InvalidArgument):
        moment_monomial_avg(haar, 1, [4], [0], [0], [0])
    with pytest.raises(InvalidArgument):
        moment_monomial_avg(haar, 2, [0], [0], [0], [0])


@pytest.mark.parametrize("d_qubits", [1, 2, 3])
def test_haar_monomials_closed_form(d_qubits):
    d = 2**d_qubits
    # E|U00|^4 = 2 / (d (d + 1)); E|U00 U11|^2 = 1 / (d^2 - 1)
    assert haar_monomial(d_qubits, 2, [0, 0], [0, 0], [0, 0], [0, 0]) == pytest.approx(2 / (d * (d + 1)), abs=1e-14)
    assert haar_monomial(d_qubits, 2, [0, 1], [0, 1], [0, 1], [0, 1]) == pytest.approx(1 / (d * d - 1), abs=1e-14)
    # E U00 U11 conj(U01 U10) = -1 / (d (d^2 - 1))
    assert haar_monomial(d_qubits, 2, [0, 1], [0, 1], [0, 1], [1, 0]) == pytest.approx(-1 / (d * (d * d - 1)), abs=1e-14)


def test_haar_monomial_matches_projector_entry():
    n, k = 2, 2
    g = haar_projector_dense(n, k)
    rows, cols, crows, ccols = [1, 3], [2, 0], [3, 1], [0, 2]
    d = 2**n
    r = np.ravel_multi_index(tuple(rows) + tuple(crows), (d,) * 4)
    c = np.ravel_multi_index(tuple(cols) + tuple(ccols), (d,) * 4)
    e = np.zeros(d**4)
    e[c] = 1
    f = np.zeros(d**4)
    f[r] = 1
    entry = copy_to_site_major(f, n, k) @ g @ copy_to_site_major(e, n, k)
    assert haar_monomial(n, k, rows, cols, crows, ccols) == pytest.approx(entry, abs=1e-14)


def test_monomial_mc_with_shared_unitaries():
    spec = EnsembleSpec(2, 1, "line-nn", 4)
    us = ensemble_unitaries(spec, 50)
    a = moment_monomial_avg(spec, 1, [0], [1], [0], [1], unitaries=us)
    assert a.value == pytest.approx(np.mean(np.abs(us[:, 0, 1]) ** 2))
    assert a.samples == 50 and a.std_error > 0
