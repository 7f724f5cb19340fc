"""Monte-Carlo summaries."""

from __future__ import annotations

import numpy as np

BOOTSTRAP_RESAMPLES = 1000


def bootstrap_se(values, resamples: int = BOOTSTRAP_RESAMPLES, seed: int = 0, block: int = 100) -> float:
    """Bootstrap standard error of the sample mean.

    Complex data: the real and imaginary standard errors are added in
    quadrature.  Resample indices come from ``seed`` only, so the result is a
    deterministic function of ``(values, resamples, seed)``.
    """
    values = np.asarray(values)
    n = values.shape[0]
    if n < 2:
        return 0.0
    gen = np.random.default_rng(seed)
    means = []
    for start in range(0, resamples, block):
        size = min(block, resamples - start)
        idx = gen.integers(0, n, size=(size, n))
        means.append(values[idx].mean(axis=1))
    means = np.concatenate(means)
    if np.iscomplexobj(means):
        return float(np.hypot(means.real.std(), means.imag.std()))
    return float(means.std())


def quantiles(values, qs=(0.5, 0.9)) -> list[float]:
    return [float(np.quantile(values, q)) for q in qs]
