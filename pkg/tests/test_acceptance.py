"""End-to-end acceptance runs for the whole pipeline.

Seven checks, each printing a single ``ACCEPTANCE n (...): PASS/FAIL``
line even under captured output before asserting its conditions:

1. covariance structure of the simulated weighted field,
2. pointwise zero intensity of the pure-noise model against 1/pi,
3. count-error consistency against the closed-form expected counts,
4. cross-resolution failure-probability table,
5. off-grid refinement certifying detected zeros,
6. algorithmic invariants (separation, scale invariance, determinism),
7. closed-form identities to 1e-10.

The Monte-Carlo checks use fixed seed ranges, so every run sees the same
realizations; the whole module takes a few minutes on one core.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from bargzeros import (
    SignalKind,
    SignalModel,
    WeightedField,
    amn,
    bargmann_closed_form,
    count_in_box,
    covariance_probe,
    draw_noise,
    expected_count,
    failure_rate,
    greedy_match,
    intensity_estimator,
    intensity_scale,
    make_grid,
    mgn,
    model_for,
    raw_threshold,
    refine_zero,
    rho1,
    sample_signal,
    sieve,
    st,
    subsample,
    synthesize_field,
    variance_benchmark,
    wasserstein_within,
    write_field,
    write_pointset_csv,
    zero_noise,
)

SIGMA = 1.0
ZERO = SignalModel(SignalKind.ZERO)
DETECTORS = {"amn": amn, "mgn": mgn, "st": st}


def _report(capsys, num: int, label: str, ok: bool) -> None:
    with capsys.disabled():
        print(f"\nACCEPTANCE {num} ({label}): {'PASS' if ok else 'FAIL'}")


def _sup(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.maximum(
        np.abs(a.real[:, None] - b.real[None, :]),
        np.abs(a.imag[:, None] - b.imag[None, :]),
    )


# ---------------------------------------------------------------------------
# 1. covariance of the weighted field


def test_weighted_field_covariance(capsys):
    g = make_grid(L=2, delta=2.0**-5, T=6)
    fields = [synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g) for seed in range(2000)]

    probes = [0j, 0.5 + 0j, -0.5 + 0j, 0.5j, -0.5j,
              0.5 + 0.5j, -0.5 - 0.5j, 0.5 - 0.5j, -0.5 + 0.5j]
    variances = {z: covariance_probe(fields, z, z).real for z in probes}
    pairs = [(0j, 0.5 + 0j), (-0.5 + 0j, 0.5 + 0j), (-1 + 0j, 1 + 0j)]
    covs = {(z, w): abs(covariance_probe(fields, z, w)) for z, w in pairs}

    var_ok = all(0.9 <= v <= 1.1 for v in variances.values())
    cov_ok = all(
        abs(c - math.exp(-abs(z - w) ** 2 / 2.0)) <= 0.05 for (z, w), c in covs.items()
    )
    _report(capsys, 1, "weighted-field covariance", var_ok and cov_ok)

    for z, v in variances.items():
        assert 0.9 <= v <= 1.1, f"variance at {z} is {v:.4f}"
    for (z, w), c in covs.items():
        want = math.exp(-abs(z - w) ** 2 / 2.0)
        assert abs(c - want) <= 0.05, f"|cov({z},{w})| = {c:.4f}, expected {want:.4f} +- 0.05"


# ---------------------------------------------------------------------------
# 2. pointwise intensity of the pure-noise zero set


@pytest.fixture(scope="module")
def intensity_runs():
    """Intensity estimates over the box of half-width 4 for seeds 0..999.

    The first 200 seeds form the comparison sample; the full thousand
    validate the area-scaled std benchmark before it is used as a
    tolerance.  Shared with the failure-table check below.
    """
    g = make_grid(L=5, delta=2.0**-6, T=6)
    rho = {name: [] for name in DETECTORS}
    for seed in range(1000):
        f = synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g)
        for name, detect in DETECTORS.items():
            rho[name].append(intensity_estimator(detect(f, 4.0), 4.0))
    return {name: np.asarray(vals) for name, vals in rho.items()}


def _intensity_protocol(x: np.ndarray, target_std: float) -> tuple[bool, bool]:
    """(mean criterion, std criterion) for one method's intensity sample."""
    bias = abs(float(x.mean()) - 1.0 / math.pi)
    std = float(x.std(ddof=1))
    se = std / math.sqrt(len(x))
    return bias <= 3.0 * se, 0.7 * target_std <= std <= 1.3 * target_std


def test_pointwise_intensity(intensity_runs, capsys):
    target = variance_benchmark(area=64.0)

    # the area-scaling heuristic must hold in a direct long run before the
    # benchmark may serve as a tolerance for the shorter protocol sample
    validated = all(
        0.7 * target <= float(intensity_runs[m].std(ddof=1)) <= 1.3 * target
        for m in ("amn", "mgn")
    )

    sample = {m: x[:200] for m, x in intensity_runs.items()}
    results = {m: _intensity_protocol(x, target) for m, x in sample.items()}
    st_violates = not all(results["st"])
    ok = validated and all(results["amn"]) and all(results["mgn"]) and st_violates
    _report(capsys, 2, "pointwise intensity vs 1/pi", ok)

    assert validated, (
        f"R=1000 std validation failed: "
        f"amn {intensity_runs['amn'].std(ddof=1):.5f}, "
        f"mgn {intensity_runs['mgn'].std(ddof=1):.5f} vs benchmark {target:.5f}"
    )
    for m in ("amn", "mgn"):
        mean_ok, std_ok = results[m]
        assert mean_ok, f"{m}: |mean - 1/pi| exceeds 3*SE"
        assert std_ok, f"{m}: std {sample[m].std(ddof=1):.5f} outside +-30% of {target:.5f}"
    assert st_violates, "st unexpectedly satisfies both intensity criteria"


# ---------------------------------------------------------------------------
# 3. count errors against expected counts


def test_count_error_consistency(capsys):
    g = make_grid(L=4, delta=2.0**-7, T=6)
    boxes = (1.0, 2.0, 3.0)
    models = {
        (kind, A): model_for(kind, A)
        for kind in (SignalKind.GAUSS, SignalKind.HERMITE1)
        for A in (1.0, 100.0)
    }
    means = {key: synthesize_field(zero_noise(g), m, g).values for key, m in models.items()}
    expect = {
        (key, w): expected_count(m, SIGMA, w, step=g.delta)
        for key, m in models.items()
        for w in boxes
    }

    counts: dict[tuple, list[int]] = {}
    for seed in range(100):
        noise = synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g)
        for key in models:
            f = WeightedField(grid=g, values=noise.values + means[key])
            for name, detect in DETECTORS.items():
                pts = detect(f, 3.0)
                for w in boxes:
                    counts.setdefault((key, name, w), []).append(count_in_box(pts, w))

    def beta(key, name, w):
        errs = (np.asarray(counts[(key, name, w)]) - expect[(key, w)]) / (2.0 * w) ** 2
        return float(errs.mean()), float(errs.std(ddof=1)) / math.sqrt(len(errs))

    grid_ok = True
    for key in models:
        for name in ("amn", "mgn"):
            for w in boxes:
                mean, se = beta(key, name, w)
                grid_ok &= abs(mean) <= max(0.02, 3.0 * se)

    # the threshold detector misses the deterministic zero of the strong
    # first-Hermite signal, so its count error dwarfs the neighbourhood
    # detectors' on at least one box
    strong = (SignalKind.HERMITE1, 100.0)
    st_vs_amn = any(
        abs(beta(strong, "st", w)[0]) >= 3.0 * abs(beta(strong, "amn", w)[0]) for w in boxes
    )
    _report(capsys, 3, "count-error consistency", grid_ok and st_vs_amn)

    for key in models:
        for name in ("amn", "mgn"):
            for w in boxes:
                mean, se = beta(key, name, w)
                assert abs(mean) <= max(0.02, 3.0 * se), (
                    f"{key[0].value} A={key[1]:g} {name} box {w}: "
                    f"beta {mean:+.4f} exceeds max(0.02, {3 * se:.4f})"
                )
    assert st_vs_amn, "st count error never dominates amn's for hermite1 A=100"


# ---------------------------------------------------------------------------
# 4. cross-resolution failure table


@pytest.fixture(scope="module")
def ladder_runs():
    """Failure rates per (signal, method, coarse spacing) over 200 seeds.

    Each realization is synthesized once at spacing 2^-8 and subsampled
    down the ladder; the fine-grid neighbourhood detections serve as the
    proxy truth for every coarser run of the same realization.
    """
    g = make_grid(L=3, delta=2.0**-8, T=6)
    gauss1 = model_for(SignalKind.GAUSS, 1.0)
    mean_gauss = synthesize_field(zero_noise(g), gauss1, g).values

    bits: dict[tuple, list[int]] = {}
    for seed in range(200):
        noise = synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g)
        for tag, vals in (("zero", noise.values), ("gauss1", noise.values + mean_gauss)):
            f_hi = WeightedField(grid=g, values=vals)
            proxy = amn(f_hi, 2.0)
            f_lo = f_hi
            for _ in range(3):
                f_lo = subsample(f_lo)
                d_lo = f_lo.grid.delta
                for name, detect in DETECTORS.items():
                    match = greedy_match(proxy, detect(f_lo, 2.0), d_lo)
                    bits.setdefault((tag, name, d_lo), []).append(match.certificate)
    return {key: failure_rate(vals) for key, vals in bits.items()}


def test_failure_probability_table(ladder_runs, intensity_runs, capsys):
    ladder = (2.0**-5, 2.0**-6, 2.0**-7)  # coarse to fine
    monotone = all(
        ladder_runs[(tag, name, ladder[i])] >= ladder_runs[(tag, name, ladder[i + 1])]
        for tag in ("zero", "gauss1")
        for name in ("amn", "mgn")
        for i in range(len(ladder) - 1)
    )
    fine_ok = all(ladder_runs[(tag, "amn", 2.0**-7)] <= 0.05 for tag in ("zero", "gauss1"))

    target = variance_benchmark(area=64.0)
    st_fails_intensity = not all(_intensity_protocol(intensity_runs["st"][:200], target))
    st_worse = all(
        ladder_runs[(tag, "st", 2.0**-7)] >= 5.0 * ladder_runs[(tag, "amn", 2.0**-7)]
        for tag in ("zero", "gauss1")
    )
    ok = monotone and fine_ok and (st_worse or st_fails_intensity)
    _report(capsys, 4, "failure-probability table", ok)

    table = {
        (tag, name): [ladder_runs[(tag, name, d)] for d in ladder]
        for tag in ("zero", "gauss1")
        for name in DETECTORS
    }
    assert monotone, f"failure rates not monotone along the ladder: {table}"
    assert fine_ok, f"amn failure rate above 5% at the finest spacing: {table}"
    assert st_worse or st_fails_intensity, f"st neither worse on the ladder nor off-target: {table}"


# ---------------------------------------------------------------------------
# 5. refinement certifies detected zeros


def test_refinement_certifies_detections(capsys):
    g = make_grid(L=3, delta=2.0**-7, T=6)
    radius = 2.0 * g.delta
    good = total = 0
    for seed in range(50):
        f = synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g)
        for p in amn(f, 2.0).points:
            loc, mag = refine_zero(f.source, complex(p), radius, 4)
            moved = max(abs(loc.real - p.real), abs(loc.imag - p.imag))
            good += mag < 1e-2 and moved <= radius
            total += 1
    rate = good / total
    _report(capsys, 5, "refinement certifies detections", rate >= 0.99)
    assert rate >= 0.99, f"only {good}/{total} detections refine to near-zeros"


# ---------------------------------------------------------------------------
# 6. algorithmic invariants


def test_algorithmic_invariants(capsys, tmp_path):
    g = make_grid(L=2, delta=2.0**-5, T=6)
    ok = True

    # separation and scale invariance on a couple of realizations
    nonvacuous = 0
    for seed in (3, 11):
        f = synthesize_field(draw_noise(g, SIGMA, seed), ZERO, g)
        for name in ("amn", "st"):
            pts = DETECTORS[name](f, 1.5).points
            if len(pts) > 1:
                d = _sup(pts, pts)
                np.fill_diagonal(d, np.inf)
                assert d.min() >= 5.0 * g.delta - 1e-12, f"{name} output not separated"
        base = {name: DETECTORS[name](f, 1.5) for name in ("amn", "mgn")}
        for c in (1e-3, 1.0, 1e3):
            scaled = WeightedField(grid=g, values=f.values * c)
            for name in ("amn", "mgn"):
                same = np.array_equal(DETECTORS[name](scaled, 1.5).kl, base[name].kl)
                ok &= same
                assert same, f"{name} output changed under scaling by {c}"

        # sieving a raw candidate set: kept points separated, dropped ones covered
        cand = raw_threshold(f, 1.5, 0.1)
        kept = sieve(cand, f)
        cover = _sup(cand.points, kept.points)
        assert (cover.min(axis=1) <= 4.0 * g.delta + 1e-12).all(), "sieve dropped an uncovered point"

        # greedy certificate is sound for the exact matching oracle
        f_lo = subsample(f)
        hi, lo = amn(f, 1.5), amn(f_lo, 1.5)
        match = greedy_match(hi, lo, f_lo.grid.delta)
        if match.certificate == 0:
            nonvacuous += 1
            oracle = wasserstein_within(hi, lo, 1.5, 2.0 * f_lo.grid.delta, 2.0 * f_lo.grid.delta)
            ok &= oracle == 1
            assert oracle == 1, "greedy certificate not confirmed by matching oracle"
    assert nonvacuous, "no certified match found; soundness check never exercised"

    # bit-identical reruns end to end: noise, synthesis, detection, files
    runs = []
    for _ in range(2):
        f = synthesize_field(draw_noise(g, SIGMA, 7), ZERO, g)
        pts = amn(f, 1.5)
        field_path = tmp_path / f"run{len(runs)}.wfield"
        csv_path = tmp_path / f"run{len(runs)}.csv"
        write_field(f, field_path)
        write_pointset_csv(pts, csv_path)
        runs.append((f.values.tobytes(), pts.kl.tobytes(),
                     field_path.read_bytes(), csv_path.read_bytes()))
    deterministic = runs[0] == runs[1]
    ok &= deterministic
    _report(capsys, 6, "algorithmic invariants", ok)
    assert deterministic, "identical seeds produced different artifacts"


# ---------------------------------------------------------------------------
# 7. closed-form identities


def test_closed_form_identities(capsys):
    tol = 1e-10
    ok = True

    # intensity of the pure-noise zero set is flat at 1/pi
    zs = np.array([0j, 0.3 - 0.2j, 1 + 1j, -2.5 + 0.1j])
    ok &= bool(np.all(np.abs(rho1(ZERO, SIGMA, zs) - 1.0 / math.pi) < tol))

    # unit-amplitude gaussian: intensity dips to e^-1/pi at the origin
    gauss1 = model_for(SignalKind.GAUSS, 1.0)
    ok &= abs(rho1(gauss1, SIGMA, 0j) - math.exp(-1.0) / math.pi) < tol

    # first Hermite with coefficient c: (1 + |c|^2)/pi at the origin
    c = 0.7 - 0.3j
    herm = SignalModel(SignalKind.HERMITE1, c)
    ok &= abs(rho1(herm, SIGMA, 0j) - (1.0 + abs(c) ** 2) / math.pi) < tol

    # closed-form transforms against the defining integral
    def transform_by_quadrature(model: SignalModel, z: complex) -> complex:
        def integrand(t: float, part) -> float:
            return part(sample_signal(model, t) * np.exp(-t * t + 2.0 * t * z))

        re = quad(integrand, -12.0, 12.0, args=(np.real,), epsabs=1e-13, epsrel=1e-13)[0]
        im = quad(integrand, -12.0, 12.0, args=(np.imag,), epsabs=1e-13, epsrel=1e-13)[0]
        return math.sqrt(2.0 / math.pi) * np.exp(-z * z / 2.0) * complex(re, im)

    pair_err = 0.0
    for model in (ZERO, SignalModel(SignalKind.GAUSS, 1.3 - 0.4j), herm):
        for z in (0j, 0.5 + 0j, -0.3 + 0.7j, 1.2 - 0.9j):
            got = bargmann_closed_form(model, z)
            pair_err = max(pair_err, abs(got - transform_by_quadrature(model, z)))
    ok &= pair_err < tol

    # peak weighted amplitude of the first Hermite mode sits at exp(-1/2)
    scale_err = abs(intensity_scale(SignalKind.HERMITE1, 1.0) - math.exp(0.5))
    ok &= scale_err < tol
    ok &= abs(intensity_scale(SignalKind.GAUSS, 1.0) - 1.0) < tol

    _report(capsys, 7, "closed-form identities", ok)
    assert np.all(np.abs(rho1(ZERO, SIGMA, zs) - 1.0 / math.pi) < tol)
    assert abs(rho1(gauss1, SIGMA, 0j) - math.exp(-1.0) / math.pi) < tol
    assert abs(rho1(herm, SIGMA, 0j) - (1.0 + abs(c) ** 2) / math.pi) < tol
    assert pair_err < tol, f"transform mismatch up to {pair_err:.2e}"
    assert scale_err < tol
