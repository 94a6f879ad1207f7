"""Kac-Rice first intensity, expected counts, and the empirical estimators.

For the model ``F = F1 + sigma * F0`` (``F0`` the Gaussian entire function
with covariance ``exp(z * conj(w))``) the density of zeros per unit area is

    rho1(zeta) = (1/pi) * exp(-|F1|^2 * exp(-|zeta|^2) / sigma^2)
                 * (1 + exp(-|zeta|^2)/sigma^2 * |F1' - conj(zeta)*F1|^2)

which collapses to the flat ``1/pi`` when the deterministic part vanishes.
Counts of detected zeros over a box, normalised by its area, estimate this
intensity; their deviation from the integrated density is the count-error
statistic aggregated in the experiment reports.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import PointSet, _int_ratio
from .signal import SignalModel, bargmann_closed_form, bargmann_derivative
from .simulate import WeightedField

#: reference standard deviation of count/area for the pure-noise model on
#: the box of half-width 6 (obtained by integrating the two-point intensity
#: of the Gaussian entire function; carried here as a constant).
_VAR_BENCHMARK_OMEGA6 = 0.01165
_OMEGA6_AREA = 144.0

#: default quadrature step; callers evaluating signals with sharp intensity
#: spikes (large A) should pass their grid spacing if it is finer
_DEFAULT_STEP = 1.0 / 64.0


def rho1(signal: SignalModel, sigma: float, zeta):
    """First intensity of the zero set at ``zeta`` (scalar or array)."""
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    zeta = np.asarray(zeta, dtype=np.complex128)
    f1 = np.asarray(bargmann_closed_form(signal, zeta))
    df1 = np.asarray(bargmann_derivative(signal, zeta))
    wt = np.exp(-np.abs(zeta) ** 2) / (sigma * sigma)
    cov = np.abs(df1 - np.conj(zeta) * f1) ** 2
    out = (1.0 / math.pi) * np.exp(-np.abs(f1) ** 2 * wt) * (1.0 + wt * cov)
    return out if out.ndim else float(out)


def expected_count(
    signal: SignalModel,
    sigma: float,
    halfwidth: float,
    step: float | None = None,
) -> float:
    """Midpoint-rule integral of ``rho1`` over the centred box.

    The integrand is smooth but can spike near the origin for strong
    signals, so the step should resolve ``1/A``; the default 1/64 matches
    the coarsest experiment resolution.
    """
    if halfwidth < 0:
        raise ConfigError("halfwidth must be non-negative")
    if halfwidth == 0:
        return 0.0
    h = _DEFAULT_STEP if step is None else step
    if h <= 0:
        raise ConfigError(f"quadrature step must be positive, got {h}")
    n = max(1, round(2.0 * halfwidth / h))
    h = 2.0 * halfwidth / n
    mid = -halfwidth + h * (np.arange(n) + 0.5)
    zg = mid[:, None] + 1j * mid[None, :]
    return float(np.sum(rho1(signal, sigma, zg)) * h * h)


def count_in_box(points: PointSet, halfwidth: float) -> int:
    """Number of points in the closed centred box (exact index test)."""
    w = _int_ratio(points.domain_halfwidth, points.delta, "domain_halfwidth/delta")
    r = _int_ratio(halfwidth, points.delta, "halfwidth/delta")
    if r > w:
        raise ConfigError("box exceeds the point set's domain")
    kl = points.kl
    inside = (np.abs(kl[:, 0] - w) <= r) & (np.abs(kl[:, 1] - w) <= r)
    return int(inside.sum())


def intensity_estimator(points: PointSet, halfwidth: float) -> float:
    """Points in the closed box divided by its area."""
    if halfwidth <= 0:
        raise ConfigError("halfwidth must be positive")
    area = (2.0 * halfwidth) ** 2
    return count_in_box(points, halfwidth) / area


def count_error_estimator(
    points: PointSet,
    signal: SignalModel,
    sigma: float,
    halfwidth: float,
    step: float | None = None,
) -> float:
    """Signed area-normalised deviation of the count from its expectation."""
    if halfwidth <= 0:
        raise ConfigError("halfwidth must be positive")
    area = (2.0 * halfwidth) ** 2
    expect = expected_count(signal, sigma, halfwidth, step=step)
    return (count_in_box(points, halfwidth) - expect) / area


def count_error_summary(
    point_sets: list[PointSet],
    signal: SignalModel,
    sigma: float,
    halfwidths: list[float],
    step: float | None = None,
):
    """Mean/std/standard-error of the count error over realizations, per
    nested box.  Returns a list of ``(halfwidth, mean, std, se)`` tuples."""
    if not point_sets:
        raise ConfigError("need at least one realization")
    rows = []
    for w in halfwidths:
        vals = np.array(
            [count_error_estimator(ps, signal, sigma, w, step=step) for ps in point_sets]
        )
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        rows.append((w, float(vals.mean()), std, std / math.sqrt(len(vals))))
    return rows


def variance_benchmark(area: float = _OMEGA6_AREA) -> float:
    """Reference std of count/area for the pure-noise model.

    The base constant is for the box of half-width 6; other areas are
    scaled with the count-variance-proportional-to-area heuristic, which
    callers must validate by Monte Carlo before using as a tolerance.
    """
    if area <= 0:
        raise ConfigError("area must be positive")
    return _VAR_BENCHMARK_OMEGA6 * math.sqrt(_OMEGA6_AREA / area)


def covariance_probe(fields: list[WeightedField], z: complex, w: complex) -> complex:
    """Empirical covariance of the weighted field at two grid points
    across realizations."""
    if len(fields) < 2:
        raise ConfigError("covariance needs at least two realizations")
    zs = np.empty(len(fields), dtype=np.complex128)
    ws = np.empty(len(fields), dtype=np.complex128)
    for i, f in enumerate(fields):
        kz = f.grid.index_of(z)
        kw = f.grid.index_of(w)
        zs[i] = f.values[kz]
        ws[i] = f.values[kw]
    return complex(np.mean(zs * np.conj(ws)) - np.mean(zs) * np.conj(np.mean(ws)))


# ---------------------------------------------------------------------------
# report rows

@dataclass(frozen=True)
class StatRow:
    """One line of a statistics report."""

    estimator: str
    signal: str
    A: float
    sigma: float
    delta: float
    halfwidth: float
    R: int
    mean: float
    std: float
    se: float


_STAT_COLUMNS = ["estimator", "signal", "A", "sigma", "delta", "halfwidth", "R", "mean", "std", "se"]


def write_stats_csv(rows: list[StatRow], path, meta: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (meta or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(_STAT_COLUMNS)
        for r in rows:
            writer.writerow(
                [r.estimator, r.signal, repr(r.A), repr(r.sigma), repr(r.delta),
                 repr(r.halfwidth), r.R, repr(r.mean), repr(r.std), repr(r.se)]
            )
