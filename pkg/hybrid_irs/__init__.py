"""
Hybrid active/passive IRS link simulator.

Monte Carlo ergodic capacity, its statistical-CSI approximation, and the
optimal beamforming and active/passive element allocation of a hybrid
intelligent reflecting surface serving a worst-case user.
"""

from .allocation import (
    Architecture,
    OptimalDesign,
    PowerRegime,
    Thresholds,
    allocate_los,
    allocate_rayleigh,
    allocate_search,
    capacity_los_variants,
    capacity_opt,
    optimal_alpha,
    optimal_phases,
    power_regime,
    select_architecture,
    thresholds,
)
from .capacity import (
    ApproxTerms,
    CapacityEstimate,
    ReflectionConfig,
    aligned_capacity,
    approx_capacity,
    approx_terms,
    mc_ergodic_capacity,
    receiver_snr,
)
from .config import ScenarioConfig, load_config, load_preset
from .params import PURE_LOS, Allocation, ArrayGeometry, SystemParams, validate

__version__ = "0.1.0"
