"""
Pytest configuration and shared fixtures for the simulator tests.
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

# Make the package importable without installation
repo_root = Path(__file__).parent.parent
sys.path.insert(0, str(repo_root))

import numpy as np
import pytest

from hybrid_irs.params import PURE_LOS, SystemParams, dbm_to_watt

ALPHA_MAX = 10.0 ** 1.4


@pytest.fixture
def default_params():
    """Worst-case-user defaults (K = 10 dB)."""
    return SystemParams()


@pytest.fixture
def los_params():
    """Defaults with pure LoS links."""
    return SystemParams(k1=PURE_LOS, k2=PURE_LOS)


@pytest.fixture
def rayleigh_params():
    """Defaults with Rayleigh links and a power budget one element can absorb unclamped."""
    return SystemParams(k1=0.0, k2=0.0, p_irs=dbm_to_watt(-25.0))


@pytest.fixture
def rng():
    """Fixed-seed generator for randomized property tests."""
    return np.random.default_rng(42)


def with_budget(params: SystemParams, amplification_budget: float) -> SystemParams:
    """Set p_irs so that P_I / (P_B*beta/D^2 + sigma_I^2) equals the given value."""
    return replace(params, p_irs=amplification_budget * params.amplifier_input_power)


def draw_los_favorable(rng: np.random.Generator) -> SystemParams:
    """
    Random pure-LoS parameters in the Favorable regime with integer costs,
    W_pas = 1 and 2*W_act/W_pas safely below alpha_max.
    """
    w_act = int(rng.integers(2, 11))
    base = SystemParams(
        p_bs=dbm_to_watt(rng.uniform(5.0, 25.0)),
        sigma2_amp=dbm_to_watt(rng.uniform(-90.0, -70.0)),
        sigma2_rx=dbm_to_watt(rng.uniform(-90.0, -70.0)),
        d_bi=rng.uniform(30.0, 100.0),
        d_iu=rng.uniform(5.0, 40.0),
        k1=PURE_LOS,
        k2=PURE_LOS,
        w_act=float(w_act),
        w_pas=1.0,
    )
    n_star = rng.uniform(5.0, 200.0)
    params = with_budget(base, 4.0 * w_act ** 2 * n_star)

    low_k = math.ceil(1.05 * 4.0 * w_act ** 2 * n_star / ALPHA_MAX ** 2)
    high_k = math.floor(n_star) - 1
    if rng.random() < 0.3 and low_k <= high_k:
        w0 = float(w_act * rng.integers(low_k, high_k + 1))
    else:
        w_ah = w_act * n_star
        w0 = float(math.floor(rng.uniform(1.2 * w_ah, 5.0 * w_ah + 50.0)))
    return replace(params, w0=w0).validate()


def draw_los_ordered(rng: np.random.Generator) -> SystemParams:
    """
    Random pure-LoS parameters whose amplification-to-receiver noise ratio
    lies in (0.05, 2.9) and whose power budget powers at least two elements.
    """
    while True:
        params = _los_ordered_candidate(rng)
        if params.p_irs >= 2.0 * params.amplifier_input_power:
            return params


def _los_ordered_candidate(rng: np.random.Generator) -> SystemParams:
    base = SystemParams(
        p_bs=dbm_to_watt(rng.uniform(0.0, 30.0)),
        sigma2_amp=dbm_to_watt(rng.uniform(-95.0, -65.0)),
        sigma2_rx=dbm_to_watt(rng.uniform(-95.0, -65.0)),
        beta=10.0 ** (rng.uniform(-4.0, -2.0)),
        d_bi=rng.uniform(10.0, 200.0),
        d_iu=rng.uniform(2.0, 60.0),
        k1=PURE_LOS,
        k2=PURE_LOS,
        w_act=rng.uniform(1.5, 20.0),
        w_pas=rng.uniform(0.5, 3.0),
    )
    ratio = rng.uniform(0.05, 2.9)
    budget = ratio * base.sigma2_rx / base.amp_noise_gain
    return with_budget(base, budget).validate()


def draw_rayleigh_favorable(rng: np.random.Generator) -> SystemParams:
    """
    Random Rayleigh parameters where one active element can take the whole
    amplification budget without hitting alpha_max.
    """
    w_act = int(rng.integers(2, 11))
    w0 = float(rng.integers(w_act + 1, 5000))
    budget = rng.uniform(w_act + 1.0, 600.0)
    base = SystemParams(
        p_bs=dbm_to_watt(rng.uniform(5.0, 25.0)),
        sigma2_rx=dbm_to_watt(rng.uniform(-90.0, -70.0)),
        d_bi=rng.uniform(30.0, 100.0),
        d_iu=rng.uniform(5.0, 40.0),
        k1=0.0,
        k2=0.0,
        w_act=float(w_act),
        w_pas=1.0,
        w0=w0,
    )
    # place the one-active-element threshold around w0
    target = w0 * math.exp(rng.uniform(-1.0, 1.0))
    amp_noise_gain = (budget - w_act) * base.sigma2_rx / (budget * target)
    base = replace(base, sigma2_amp=amp_noise_gain * base.d_iu ** 2 / base.beta)
    return with_budget(base, budget).validate()


@pytest.fixture
def los_favorable_draws():
    """100 Favorable-regime pure-LoS parameter sets."""
    generator = np.random.default_rng(20240601)
    return [draw_los_favorable(generator) for _ in range(100)]


@pytest.fixture
def write_config(tmp_path):
    """Write a scenario document to a temporary JSON file."""
    import json

    def _write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write
