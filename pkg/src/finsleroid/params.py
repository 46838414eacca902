"""Coupling constants, vector value types and the sector decomposition."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, SectorError

DEFAULT_DIM = 3
ISOTROPIC_RTOL = 1e-12


@dataclass(frozen=True)
class CouplingParams:
    """The deformation parameter ``g`` with every derived constant.

    Naming: ``g_plus``/``g_minus`` are the lower-index constants entering the
    metric function, ``g_sup_plus``/``g_sup_minus`` their reciprocals used by
    the Hamiltonian and the cone slopes.
    """

    g: float
    h: float
    G: float
    g_plus: float
    g_minus: float
    G_plus: float
    G_minus: float
    g_sup_plus: float
    g_sup_minus: float
    G_sup_plus: float
    G_sup_minus: float

    @classmethod
    def from_g(cls, g: float) -> "CouplingParams":
        return derive_params(g)


def derive_params(g: float) -> CouplingParams:
    g = float(g)
    if not math.isfinite(g):
        raise DomainError(f"coupling g must be finite, got {g!r}")
    h = math.sqrt(1.0 + 0.25 * g * g)
    G = g / h
    # h + g/2 and h - g/2 are reciprocal; take each difference as 1/sum to avoid cancellation
    hp, hm = h + 0.5 * g, h - 0.5 * g
    if g >= 0:
        hm = 1.0 / hp
    else:
        hp = 1.0 / hm
    g_plus, g_sup_plus = hm, hp
    g_minus, g_sup_minus = -hp, -hm
    return CouplingParams(
        g=g,
        h=h,
        G=G,
        g_plus=g_plus,
        g_minus=g_minus,
        G_plus=1.0 - 0.5 * G,
        G_minus=-1.0 - 0.5 * G,
        g_sup_plus=g_sup_plus,
        g_sup_minus=g_sup_minus,
        G_sup_plus=1.0 + 0.5 * G,
        G_sup_minus=0.5 * G - 1.0,
    )


def _coerce_params(p: CouplingParams | float) -> CouplingParams:
    return p if isinstance(p, CouplingParams) else derive_params(p)


class _VectorMixin:
    @property
    def dim(self) -> int:
        return len(self.spatial)

    @property
    def components(self) -> np.ndarray:
        return np.array((self.time, *self.spatial))

    def __array__(self, dtype=None, copy=None):
        out = self.components
        return out if dtype is None else out.astype(dtype)

    def __len__(self) -> int:
        return 1 + len(self.spatial)


def _spatial_tuple(spatial) -> tuple:
    out = tuple(float(x) for x in spatial)
    if not out:
        raise DomainError("spatial dimension must be at least 1")
    return out


@dataclass(frozen=True)
class EventVector(_VectorMixin):
    """Contravariant vector ``(R0, R^1..R^d)``."""

    R0: float
    spatial: tuple

    def __post_init__(self):
        object.__setattr__(self, "R0", float(self.R0))
        object.__setattr__(self, "spatial", _spatial_tuple(self.spatial))

    @property
    def time(self) -> float:
        return self.R0

    @classmethod
    def from_array(cls, x) -> "EventVector":
        x = np.asarray(x, dtype=float)
        return cls(x[0], x[1:])


@dataclass(frozen=True)
class MomentumCovector(_VectorMixin):
    """Covariant vector ``(P_0, P_1..P_d)``."""

    P0: float
    spatial: tuple

    def __post_init__(self):
        object.__setattr__(self, "P0", float(self.P0))
        object.__setattr__(self, "spatial", _spatial_tuple(self.spatial))

    @property
    def time(self) -> float:
        return self.P0

    @classmethod
    def from_array(cls, x) -> "MomentumCovector":
        x = np.asarray(x, dtype=float)
        return cls(x[0], x[1:])


VectorLike = Union[EventVector, MomentumCovector, Sequence[float], np.ndarray]


def as_components(v: VectorLike) -> np.ndarray:
    """Return a fresh float array ``(time, spatial...)`` for any vector-like input."""
    x = np.array(v, dtype=float).reshape(-1)
    if x.size < 2:
        raise DomainError(f"vector needs a time component and at least one spatial component, got {x.size} entries")
    return x


def spatial_norm(v: VectorLike) -> float:
    x = as_components(v)
    return float(math.sqrt(float(np.dot(x[1:], x[1:]))))


class SectorLabel(enum.Enum):
    FutureTimelike = "FutureTimelike"
    FutureIsotropic = "FutureIsotropic"
    Spacelike = "Spacelike"
    PastIsotropic = "PastIsotropic"
    PastTimelike = "PastTimelike"

    def __str__(self) -> str:
        return self.value


def _classify(time: float, m: float, upper: float, lower: float) -> SectorLabel:
    # upper > 0 > lower are the cone slopes: future boundary time = upper*m,
    # past boundary time = lower*m.
    scale = max(abs(time), m)
    if scale == 0.0:
        raise DomainError("sector of the zero vector is undefined")
    tol = ISOTROPIC_RTOL * scale
    du = time - upper * m
    dl = time - lower * m
    if abs(du) <= tol and m > 0:
        return SectorLabel.FutureIsotropic
    if abs(dl) <= tol and m > 0:
        return SectorLabel.PastIsotropic
    if du > 0:
        return SectorLabel.FutureTimelike
    if dl < 0:
        return SectorLabel.PastTimelike
    return SectorLabel.Spacelike


def classify_sector(p: CouplingParams | float, R: VectorLike) -> SectorLabel:
    """Sector of a contravariant vector, from the sign pattern of the two factors of B."""
    p = _coerce_params(p)
    x = as_components(R)
    return _classify(x[0], spatial_norm(x), p.g_sup_plus, p.g_sup_minus)


def classify_cosector(p: CouplingParams | float, P: VectorLike) -> SectorLabel:
    """Sector of a covector; the co-cone slopes are ``g_plus`` and ``g_minus``."""
    p = _coerce_params(p)
    x = as_components(P)
    return _classify(x[0], spatial_norm(x), p.g_plus, p.g_minus)


def require_future_timelike(p: CouplingParams, x: VectorLike, what: str = "vector") -> np.ndarray:
    """Return the components of ``x`` or raise ``SectorError`` unless it is future-timelike."""
    x = as_components(x)
    label = classify_sector(p, x)
    if label is not SectorLabel.FutureTimelike:
        raise SectorError(f"{what} must be future-timelike (R0 > g_sup_plus*|R|), got sector {label}")
    return x


def require_future_cotimelike(p: CouplingParams, x: VectorLike, what: str = "covector") -> np.ndarray:
    x = as_components(x)
    label = classify_cosector(p, x)
    if label is not SectorLabel.FutureTimelike:
        raise SectorError(f"{what} must be future co-timelike (P0 > g_plus*|P|), got sector {label}")
    return x
