"""
Rician channel synthesis for the active and passive sub-surfaces.

LoS components come from planar-array response vectors; scattered
components are circularly-symmetric complex Gaussians drawn from
splittable, seed-addressed random streams so that any sample can be
regenerated independently of the order it was computed in.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, GeometryMismatch, NonFiniteValue, NonPositiveValue
from .params import (
    Allocation,
    ArrayGeometry,
    ArrayLayout,
    SystemParams,
    is_pure_los,
)

logger = logging.getLogger(__name__)

ComplexVector = np.ndarray

_UINT64_LIMIT = 2 ** 64

# Sub-stream order inside one joint draw.
LINK_ORDER = ("bi_act", "iu_act", "bi_pas", "iu_pas")


@dataclass(frozen=True)
class RngStream:
    """
    Address of an independent random stream.

    (seed, stream_index, path) fully determines the generated sequence;
    ``child`` derives disjoint sub-streams for the links of one draw.
    """

    seed: int
    stream_index: int = 0
    path: Tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("seed", "stream_index"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or not 0 <= value < _UINT64_LIMIT:
                raise NonFiniteValue(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_index), *self.path)
        )

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence())

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_index, self.path + (int(index),))


@dataclass(frozen=True)
class SubSurfaceGeometries:
    """Planar layouts of the two sub-surfaces; None for an empty sub-surface."""

    active: Optional[ArrayGeometry]
    passive: Optional[ArrayGeometry]

    @classmethod
    def for_allocation(
        cls, alloc: Allocation, wavelength: float, layout: Optional[ArrayLayout] = None
    ) -> "SubSurfaceGeometries":
        layout = layout or ArrayLayout()
        return cls(
            active=ArrayGeometry.for_elements(alloc.n_act, layout, wavelength) if alloc.n_act else None,
            passive=ArrayGeometry.for_elements(alloc.n_pas, layout, wavelength) if alloc.n_pas else None,
        )

    def check(self, alloc: Allocation) -> "SubSurfaceGeometries":
        for label, geom, count in (("active", self.active, alloc.n_act),
                                   ("passive", self.passive, alloc.n_pas)):
            described = geom.n_elements if geom is not None else 0
            if described != count:
                raise GeometryMismatch(
                    f"{label} geometry describes {described} elements, allocation has {count}"
                )
        return self


@dataclass(frozen=True)
class StatisticalCsi:
    """LoS components of the four links plus the Rician factors."""

    los_bi_act: ComplexVector
    los_iu_act: ComplexVector
    los_bi_pas: ComplexVector
    los_iu_pas: ComplexVector
    k1: float
    k2: float

    def __post_init__(self):
        if len(self.los_bi_act) != len(self.los_iu_act):
            raise DimensionMismatch("active LoS vectors differ in length")
        if len(self.los_bi_pas) != len(self.los_iu_pas):
            raise DimensionMismatch("passive LoS vectors differ in length")

    @property
    def n_act(self) -> int:
        return len(self.los_bi_act)

    @property
    def n_pas(self) -> int:
        return len(self.los_bi_pas)


@dataclass(frozen=True)
class ChannelRealization:
    """One joint draw of the four cascaded-link channel vectors."""

    bi_act: ComplexVector
    iu_act: ComplexVector
    bi_pas: ComplexVector
    iu_pas: ComplexVector

    def __post_init__(self):
        if len(self.bi_act) != len(self.iu_act) or len(self.bi_pas) != len(self.iu_pas):
            raise DimensionMismatch(
                f"realization lengths ({len(self.bi_act)}, {len(self.iu_act)}, "
                f"{len(self.bi_pas)}, {len(self.iu_pas)}) are inconsistent"
            )

    @property
    def n_act(self) -> int:
        return len(self.bi_act)

    @property
    def n_pas(self) -> int:
        return len(self.bi_pas)


def steering_vector(zeta: float, m: int) -> ComplexVector:
    """
    Uniform linear array steering vector u(zeta, m).

    Args:
        zeta: Normalized spatial frequency
        m: Element count

    Returns:
        Length-m vector with entries exp(-j*pi*k*zeta)
    """
    if m < 1:
        raise DimensionMismatch(f"steering vector needs at least one element, got {m}")
    return np.exp(-1j * np.pi * zeta * np.arange(m))


def receive_response(geom: ArrayGeometry, wavelength: float, link: str = "bi") -> ComplexVector:
    """
    Planar-array response u(zeta_x, N_x) kron u(zeta_y, N_y).

    Args:
        geom: Sub-surface geometry
        wavelength: Carrier wavelength in meters
        link: "bi" for the BS->IRS arrival angles, "iu" for IRS->user departure

    Returns:
        Length n_x*n_y unit-modulus vector
    """
    if not wavelength > 0:
        raise NonPositiveValue(f"wavelength must be positive, got {wavelength}")
    azimuth, elevation = geom.link_angles(link)
    scale = 2.0 * geom.elem_spacing / wavelength
    zeta_x = scale * math.cos(azimuth) * math.sin(elevation)
    zeta_y = scale * math.sin(azimuth) * math.sin(elevation)
    return np.kron(steering_vector(zeta_x, geom.n_x), steering_vector(zeta_y, geom.n_y))


def los_channel(
    beta: float, dist: float, wavelength: float, geom: ArrayGeometry, link: str = "bi"
) -> ComplexVector:
    """
    Deterministic LoS component (sqrt(beta)/D) * exp(-j*2*pi*D/lambda) * a_r.
    """
    if not dist > 0:
        raise NonPositiveValue(f"link distance must be positive, got {dist}")
    # reduce D/lambda modulo one cycle before scaling so integer ratios give phase 0
    cycles = math.fmod(dist / wavelength, 1.0)
    gain = math.sqrt(beta) / dist * np.exp(-2j * np.pi * cycles)
    return gain * receive_response(geom, wavelength, link)


def sample_nlos(n: int, beta: float, dist: float, stream: RngStream) -> ComplexVector:
    """
    Scattered component: n i.i.d. entries distributed as (sqrt(beta)/D) * CN(0, 1).
    """
    if n < 0:
        raise DimensionMismatch(f"element count must be non-negative, got {n}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    draws = stream.generator().standard_normal((2, n))
    return (math.sqrt(beta) / dist) * (draws[0] + 1j * draws[1]) * math.sqrt(0.5)


def assemble_rician(k: float, los: ComplexVector, nlos: ComplexVector) -> ComplexVector:
    """Combine sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * nlos."""
    los = np.asarray(los, dtype=complex)
    nlos = np.asarray(nlos, dtype=complex)
    if los.shape != nlos.shape:
        raise DimensionMismatch(f"LoS length {los.shape} does not match NLoS length {nlos.shape}")
    if is_pure_los(k):
        return los.copy()
    if k == 0:
        return nlos.copy()
    return math.sqrt(k / (k + 1.0)) * los + math.sqrt(1.0 / (k + 1.0)) * nlos


def statistical_csi(
    params: SystemParams,
    alloc: Allocation,
    geoms: Optional[SubSurfaceGeometries] = None,
    layout: Optional[ArrayLayout] = None,
) -> StatisticalCsi:
    """Build the LoS components of all four links for an allocation."""
    if geoms is None:
        geoms = SubSurfaceGeometries.for_allocation(alloc, params.wavelength, layout)
    geoms.check(alloc)

    def los_pair(geom: Optional[ArrayGeometry]):
        if geom is None:
            empty = np.zeros(0, dtype=complex)
            return empty, empty.copy()
        return (
            los_channel(params.beta, params.d_bi, params.wavelength, geom, "bi"),
            los_channel(params.beta, params.d_iu, params.wavelength, geom, "iu"),
        )

    bi_act, iu_act = los_pair(geoms.active)
    bi_pas, iu_pas = los_pair(geoms.passive)
    return StatisticalCsi(bi_act, iu_act, bi_pas, iu_pas, params.k1, params.k2)


def draw_realization(csi: StatisticalCsi, params: SystemParams, stream: RngStream) -> ChannelRealization:
    """Add independent scattered parts to known LoS components."""
    plan = (
        (csi.los_bi_act, csi.k1, params.d_bi),
        (csi.los_iu_act, csi.k2, params.d_iu),
        (csi.los_bi_pas, csi.k1, params.d_bi),
        (csi.los_iu_pas, csi.k2, params.d_iu),
    )
    links = []
    for index, (los, k, dist) in enumerate(plan):
        if is_pure_los(k):
            links.append(los.copy())
            continue
        nlos = sample_nlos(len(los), params.beta, dist, stream.child(index))
        links.append(assemble_rician(k, los, nlos))
    return ChannelRealization(*links)


def sample_realization(
    params: SystemParams,
    alloc: Allocation,
    geoms: SubSurfaceGeometries,
    stream: RngStream,
) -> ChannelRealization:
    """
    Draw all four Rician channel vectors for one allocation.

    Args:
        params: Validated system parameters
        alloc: Active/passive element counts
        geoms: Sub-surface layouts matching alloc
        stream: Random stream address of this draw

    Returns:
        ChannelRealization with lengths (n_act, n_act, n_pas, n_pas)
    """
    return draw_realization(statistical_csi(params, alloc, geoms), params, stream)
