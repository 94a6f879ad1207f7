"""Cross-resolution consistency: greedy matching and failure estimates.

A high-resolution zero set serves as proxy ground truth.  A detection run
at a coarser spacing ``delta_lo`` is *certified accurate* when a greedy
matching pairs every proxy zero with a distinct detection within sup-norm
``2*delta_lo``, and every detection away from a ``2*delta_lo`` boundary
collar is used by the pairing.  Averaging the certificate bit over
realizations gives an upper bound for the failure probability of a method
at that resolution.

``wasserstein_within`` answers the same matched-within-distortion question
exactly (via maximum bipartite matching), so it bounds the greedy
construction from below and serves as its oracle in tests.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ConfigError
from .grid import PointSet


@dataclass(frozen=True)
class MatchResult:
    """Outcome of greedily matching proxy zeros to detections.

    ``matched_hi[i]`` was paired with ``matched_lo[i]``; together they
    define the injective map of the matched subset.  ``certificate`` is 0
    when the run is certified accurate, 1 otherwise.
    """

    matched_hi: np.ndarray
    matched_lo: np.ndarray
    unmatched_hi: np.ndarray
    certificate: int
    max_distortion: float
    delta_lo: float

    def phi(self) -> dict[complex, complex]:
        """The matching as a mapping."""
        return dict(zip(self.matched_hi.tolist(), self.matched_lo.tolist()))


def _sup_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise sup-norm distances between two complex vectors."""
    dre = np.abs(a.real[:, None] - b.real[None, :])
    dim = np.abs(a.imag[:, None] - b.imag[None, :])
    return np.maximum(dre, dim)


def _collar_mask(ps: PointSet, halfwidth: float) -> np.ndarray:
    pts = ps.points
    return np.maximum(np.abs(pts.real), np.abs(pts.imag)) <= halfwidth + 1e-12


def greedy_match(z_hi: PointSet, z_lo: PointSet, delta_lo: float) -> MatchResult:
    """Greedily pair proxy zeros with detections within ``2*delta_lo``.

    Proxy points are processed in their stored (row-major) order; each
    takes the sup-norm-closest still-unmatched detection in range, ties
    resolved by the detections' stored order.  Deterministic by
    construction.
    """
    if z_hi.domain_halfwidth != z_lo.domain_halfwidth:
        raise ConfigError("matched sets must share the same target box")
    hi = z_hi.points
    lo = z_lo.points
    matched_hi, matched_lo, unmatched = [], [], []
    taken = np.zeros(len(lo), dtype=bool)
    if len(lo):
        dist = _sup_dist(hi, lo)
    for i in range(len(hi)):
        if not len(lo):
            unmatched.append(hi[i])
            continue
        cand = np.flatnonzero(~taken & (dist[i] <= 2.0 * delta_lo))
        if cand.size == 0:
            unmatched.append(hi[i])
            continue
        j = cand[np.argmin(dist[i, cand])]  # argmin takes the first minimum
        taken[j] = True
        matched_hi.append(hi[i])
        matched_lo.append(lo[j])
    matched_hi = np.array(matched_hi, dtype=np.complex128)
    matched_lo = np.array(matched_lo, dtype=np.complex128)
    unmatched = np.array(unmatched, dtype=np.complex128)
    max_dist = (
        float(np.max(np.maximum(np.abs(matched_hi.real - matched_lo.real),
                                np.abs(matched_hi.imag - matched_lo.imag))))
        if len(matched_hi)
        else 0.0
    )
    collar = z_lo.domain_halfwidth - 2.0 * delta_lo
    cert = _certificate_bit(matched_lo, unmatched, z_lo, collar)
    return MatchResult(
        matched_hi=matched_hi,
        matched_lo=matched_lo,
        unmatched_hi=unmatched,
        certificate=cert,
        max_distortion=max_dist,
        delta_lo=delta_lo,
    )


def _certificate_bit(matched_lo, unmatched_hi, z_lo: PointSet, collar: float) -> int:
    if len(unmatched_hi):
        return 1
    used = set(matched_lo.tolist())
    inner = z_lo.points[_collar_mask(z_lo, collar)]
    return 0 if all(p in used for p in inner.tolist()) else 1


def certificate(
    match: MatchResult,
    z_hi: PointSet,
    z_lo: PointSet,
    L: float,
    delta_lo: float,
) -> int:
    """Certificate bit for a match over the target box ``Omega_{L-1}``.

    0 when every proxy zero was matched and every detection inside
    ``Omega_{(L-1) - 2*delta_lo}`` is in the image of the matching.
    """
    collar = (L - 1.0) - 2.0 * delta_lo
    return _certificate_bit(match.matched_lo, match.unmatched_hi, z_lo, collar)


def failure_rate(certificates) -> float:
    """Mean certificate bit over realizations."""
    certs = list(certificates)
    if not certs:
        raise ConfigError("failure_rate needs at least one certificate")
    if any(c not in (0, 1) for c in certs):
        raise ConfigError("certificates must be 0/1 bits")
    return sum(certs) / len(certs)


def wasserstein_within(
    u_set: PointSet,
    v_set: PointSet,
    L: float,
    theta: float,
    bound: float,
) -> int:
    """Decide whether an injective map ``u -> v`` with sup-norm distortion
    at most ``bound`` exists whose image covers ``V`` inside the collar box
    ``Omega_{L - theta}``.

    Two maximum-matching checks on the threshold graph suffice: one
    matching saturating ``U`` and one saturating the collar part of ``V``
    can always be combined into a single matching saturating both
    (Mendelsohn-Dulmage), so existence is equivalent to both checks
    passing.  Returns 1 when such a map exists, 0 otherwise.
    """
    u = u_set.points
    v = v_set.points
    inner = _collar_mask(v_set, L - theta)
    if len(u) == 0:
        return int(not inner.any())
    if len(v) == 0:
        return 0
    adj = (_sup_dist(u, v) <= bound + 1e-12).astype(np.int8)
    if not _saturates(adj, rows=True):
        return 0
    adj_inner = adj[:, inner]
    if adj_inner.shape[1] == 0:
        return 1
    return int(_saturates(adj_inner, rows=False))


def _saturates(adj: np.ndarray, rows: bool) -> bool:
    """Does a maximum matching of the biadjacency matrix saturate the rows
    (or columns)?"""
    want = adj.shape[0] if rows else adj.shape[1]
    graph = csr_array(adj)
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match != -1).sum()) == want


# ---------------------------------------------------------------------------
# report rows

@dataclass(frozen=True)
class ConsistencyRow:
    seed: int | None
    method: str
    delta_hi: float
    delta_lo: float
    n_hi: int
    n_lo: int
    certificate: int
    max_distortion: float


_CONSISTENCY_COLUMNS = [
    "seed", "method", "delta_hi", "delta_lo", "n_hi", "n_lo", "certificate", "max_distortion",
]


def write_consistency_csv(rows: list[ConsistencyRow], path, meta: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (meta or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(_CONSISTENCY_COLUMNS)
        for r in rows:
            writer.writerow(
                ["" if r.seed is None else r.seed, r.method, repr(r.delta_hi),
                 repr(r.delta_lo), r.n_hi, r.n_lo, r.certificate, repr(r.max_distortion)]
            )


def aggregate_failure_table(rows: list[ConsistencyRow]):
    """Failure probability per (delta_lo, method): Table-style layout with
    one row per resolution, one column per method."""
    deltas = sorted({r.delta_lo for r in rows}, reverse=True)
    methods = sorted({r.method for r in rows})
    table = {}
    for d in deltas:
        for m in methods:
            certs = [r.certificate for r in rows if r.delta_lo == d and r.method == m]
            if certs:
                table[(d, m)] = failure_rate(certs)
    return deltas, methods, table
