"""Shared parameter draws for randomized tests."""

import numpy as np

from vhd.params import BASELINE, FRACTIONS, ModelParams, ParameterError


def random_params(rng: np.random.Generator, **fixed) -> ModelParams:
    """A valid parameter set: each value within +-50% of the baseline.

    Fractions are clipped to 1, the transmission probabilities are uniform
    on (0, 1) and the biting rate is log-uniform on [1e-3, 3.0425] so that
    draws fall on both sides of R0 = 1.
    """
    while True:
        values = {name: value * rng.uniform(0.5, 1.5) for name, value in BASELINE.as_dict().items()}
        for name in FRACTIONS:
            values[name] = min(values[name], 1.0)
        values["c_vh"] = rng.uniform(0.01, 1.0)
        values["c_hv"] = rng.uniform(0.01, 1.0)
        values["a_v"] = float(np.exp(rng.uniform(np.log(1e-3), np.log(3.0425))))
        values.update(fixed)
        try:
            return ModelParams(**values)
        except ParameterError:
            continue


def draws(n: int, seed: int = 0, **fixed) -> list[ModelParams]:
    rng = np.random.default_rng(seed)
    return [random_params(rng, **fixed) for _ in range(n)]
