"""Square acquisition grids, sup-norm boxes, and dyadic subsampling.

The lattice with half-width ``L`` and spacing ``delta`` is the set
``{delta*k + 1j*delta*j : |delta*k| <= L, |delta*j| <= L}``.  Arrays are
addressed by non-negative index pairs ``(k, l)`` counted from the lower-left
corner, so the grid point at index ``(k, l)`` is
``(-Lfull + k*delta) + 1j*(-Lfull + l*delta)`` with ``Lfull = L +
margin*delta``.  All geometric predicates used by the detectors (ring
membership, separation) are evaluated on these integer indices; floating
point only enters when a point's coordinates are materialised.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError, SubsampleError

if TYPE_CHECKING:  # pragma: no cover
    from .simulate import WeightedField

#: tolerance for deciding that a ratio of float parameters is an integer
_RATIO_TOL = 1e-9


def _int_ratio(num: float, den: float, what: str) -> int:
    ratio = num / den
    n = round(ratio)
    if abs(ratio - n) > _RATIO_TOL:
        raise ConfigError(f"{what} = {num}/{den} = {ratio} is not an integer")
    return int(n)


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a square grid: half-width ``L``, spacing ``delta``,
    window truncation half-length ``T``, plus ``margin`` extra rings of
    samples beyond ``L`` (used by detectors that compare against
    neighbours of boundary points).
    """

    L: float
    delta: float
    T: float
    margin: int = 0

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.delta > 0.5:
            raise ConfigError(f"delta must be <= 1/2, got {self.delta}")
        if self.L < 1:
            raise ConfigError(f"L must be >= 1, got {self.L}")
        if self.T <= 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.margin < 0 or self.margin != int(self.margin):
            raise ConfigError(f"margin must be a non-negative integer, got {self.margin}")
        _int_ratio(self.L, self.delta, "L/delta")
        _int_ratio(self.T, self.delta, "T/delta")

    # -- integer geometry ---------------------------------------------------

    @property
    def l_over_delta(self) -> int:
        return _int_ratio(self.L, self.delta, "L/delta")

    @property
    def t_over_delta(self) -> int:
        return _int_ratio(self.T, self.delta, "T/delta")

    @property
    def half_n(self) -> int:
        """Index distance from the centre to the outermost stored ring."""
        return self.l_over_delta + self.margin

    @property
    def n_axis(self) -> int:
        """Number of stored samples per axis (odd, symmetric about 0)."""
        return 2 * self.half_n + 1

    @property
    def corner(self) -> float:
        """Coordinate of the lower-left stored sample on each axis."""
        return -(self.L + self.margin * self.delta)

    def index_halfwidth(self, halfwidth: float) -> int:
        """Half-width of a centred sup-norm box in index units."""
        w = _int_ratio(halfwidth, self.delta, "halfwidth/delta")
        if w > self.half_n:
            raise ConfigError(
                f"box halfwidth {halfwidth} exceeds stored grid halfwidth "
                f"{self.L + self.margin * self.delta}"
            )
        return w

    # -- index <-> point maps -----------------------------------------------

    def axis(self) -> np.ndarray:
        """Stored sample coordinates along one axis."""
        return self.corner + self.delta * np.arange(self.n_axis)

    def point_of(self, k: int, l: int) -> complex:
        if not (0 <= k < self.n_axis and 0 <= l < self.n_axis):
            raise ConfigError(f"index ({k}, {l}) outside grid of {self.n_axis} per axis")
        return complex(self.corner + k * self.delta, self.corner + l * self.delta)

    def index_of(self, z: complex) -> tuple[int, int]:
        """Exact inverse of :meth:`point_of`; raises for off-grid points."""
        k = round((z.real - self.corner) / self.delta)
        l = round((z.imag - self.corner) / self.delta)
        if not (0 <= k < self.n_axis and 0 <= l < self.n_axis) or self.point_of(k, l) != z:
            raise ConfigError(f"{z} is not a stored grid point")
        return k, l


def make_grid(L: float, delta: float, T: float, margin: int = 0) -> GridSpec:
    """Validated constructor for :class:`GridSpec`."""
    return GridSpec(L=L, delta=delta, T=T, margin=margin)


class Method(enum.Enum):
    """Provenance tag for a detected point set."""

    AMN = "AMN"
    MGN = "MGN"
    ST = "ST"
    TRUE_PROXY = "TRUE_PROXY"


@dataclass(frozen=True)
class PointSet:
    """A finite set of plane points on a lattice, with provenance.

    ``kl`` holds integer indices relative to the lower-left corner of the
    domain box, i.e. point ``i`` is ``(-W + delta*k_i) + 1j*(-W + delta*l_i)``
    with ``W = domain_halfwidth``.  Rows are stored sorted by ``(k, l)`` so
    that equality, CSV output, and iteration order are deterministic.

    Separation invariants (sieved outputs are 5*delta separated in sup
    norm) are asserted by the detectors that promise them, not here: the
    same type also carries unsieved candidate sets.
    """

    method: Method
    delta: float
    domain_halfwidth: float
    kl: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    seed: int | None = None

    def __post_init__(self) -> None:
        kl = np.asarray(self.kl, dtype=np.int64).reshape(-1, 2)
        w = _int_ratio(self.domain_halfwidth, self.delta, "domain_halfwidth/delta")
        if kl.size and (kl.min() < 0 or kl.max() > 2 * w):
            raise ConfigError("point indices leave the domain box")
        order = np.lexsort((kl[:, 1], kl[:, 0]))
        kl = np.ascontiguousarray(kl[order])
        kl.setflags(write=False)
        pts = (-self.domain_halfwidth + self.delta * kl[:, 0]) + 1j * (
            -self.domain_halfwidth + self.delta * kl[:, 1]
        )
        pts.setflags(write=False)
        object.__setattr__(self, "kl", kl)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.kl.shape[0]

    def min_separation(self) -> int:
        """Minimum pairwise sup-norm distance in index units (0 points or 1
        point: returns a large sentinel)."""
        n = len(self)
        if n < 2:
            return np.iinfo(np.int64).max
        dk = np.abs(self.kl[:, 0, None] - self.kl[None, :, 0])
        dl = np.abs(self.kl[:, 1, None] - self.kl[None, :, 1])
        cheb = np.maximum(dk, dl)
        np.fill_diagonal(cheb, np.iinfo(np.int64).max)
        return int(cheb.min())

    def restrict(self, halfwidth: float) -> "PointSet":
        """Points lying in the closed centred box of the given half-width."""
        w = _int_ratio(self.domain_halfwidth, self.delta, "domain_halfwidth/delta")
        r = _int_ratio(halfwidth, self.delta, "halfwidth/delta")
        keep = (np.abs(self.kl[:, 0] - w) <= r) & (np.abs(self.kl[:, 1] - w) <= r)
        return replace(self, kl=self.kl[keep])


def from_indices(
    method: Method,
    delta: float,
    domain_halfwidth: float,
    kl: np.ndarray,
    seed: int | None = None,
) -> PointSet:
    return PointSet(method=method, delta=delta, domain_halfwidth=domain_halfwidth, kl=kl, seed=seed)


def subsample(field: "WeightedField") -> "WeightedField":
    """Keep every second sample along each axis (spacing doubles).

    The lower-left corner sample is preserved, and kept values are carried
    over bit-exactly — nothing is recomputed.  The field's margin must be
    even so the retained samples again form ``margin/2`` complete rings.
    """
    from .simulate import WeightedField

    g = field.grid
    if g.n_axis < 3:
        raise SubsampleError(f"axis count {g.n_axis} too small to subsample")
    if g.margin % 2:
        raise SubsampleError(f"margin {g.margin} is odd; retained rings would be ragged")
    new_delta = 2 * g.delta
    try:
        sub = GridSpec(L=g.L, delta=new_delta, T=g.T, margin=g.margin // 2)
    except ConfigError as e:
        raise SubsampleError(f"grid not subsamplable: {e}") from e
    values = np.ascontiguousarray(field.values[::2, ::2])
    return WeightedField(grid=sub, values=values, source=field.source)
