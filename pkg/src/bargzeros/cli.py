"""Command-line experiment driver.

Four subcommands mirror the experiment pipeline:

* ``simulate``   — draw seeded realizations and cache the weighted fields;
* ``detect``     — run AMN/MGN/ST over a dyadic resolution ladder built by
  subsampling the cached fields (never by re-simulation);
* ``stats``      — aggregate intensity and count-error estimators over the
  detection CSVs;
* ``consistency``— match coarse detections against the high-resolution
  proxy and tabulate failure probabilities.

Spacings are accepted as exact dyadic expressions (``2^-7``) so that grid
parameters never pass through decimal rounding.  Every output file carries
the hash of the generating configuration; a fixed (config, seed list) pair
reproduces every byte.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from pathlib import Path

from . import consistency as cons
from . import detect as det
from . import stats as st_mod
from .errors import ConfigError, DataError
from .grid import Method, make_grid, subsample
from .signal import parse_signal
from .simulate import draw_noise, read_field, synthesize_field, write_field

_DETECTORS = {"amn": det.amn, "mgn": det.mgn, "st": det.st}


def parse_spacing(text: str) -> float:
    """Parse a grid spacing: ``2^-7``, ``2**-7``, or a plain decimal."""
    text = text.strip()
    m = re.fullmatch(r"2\s*(?:\^|\*\*)\s*\(?(-?\d+)\)?", text)
    if m:
        return 2.0 ** int(m.group(1))
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse spacing {text!r}") from None


def spacing_token(delta: float) -> str:
    """Short file-name token for a spacing; dyadic values stay exact."""
    exp = math.log2(delta)
    if exp == int(exp):
        e = int(exp)
        return f"2m{-e}" if e < 0 else f"2p{e}"
    return repr(delta).replace(".", "p").replace("-", "m")


def parse_seeds(text: str) -> list[int]:
    """``0..99`` (inclusive range) or a comma list ``0,5,17``."""
    text = text.strip()
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse seeds {text!r}") from None


def read_config_file(path) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise DataError(f"cannot read config file {path}: {e}") from e
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def config_hash(mapping: dict) -> str:
    blob = json.dumps({k: str(v) for k, v in mapping.items()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _setting(args, config: dict[str, str], key: str, default=None, parse=None):
    """Command-line flag > config-file entry > default."""
    val = getattr(args, key, None)
    if val is None:
        val = config.get(key)
        if val is not None and parse is not None:
            val = parse(val)
    if val is None:
        val = default
    return val


def _require(val, key: str):
    if val is None:
        raise ConfigError(f"missing required setting '{key}'")
    return val


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(args) -> int:
    config = read_config_file(args.config) if args.config else {}
    L = _require(_setting(args, config, "L", parse=float), "L")
    delta = _require(_setting(args, config, "delta", parse=parse_spacing), "delta")
    T = _setting(args, config, "T", default=6.0, parse=float)
    sigma = _setting(args, config, "sigma", default=1.0, parse=float)
    margin = _setting(args, config, "margin", default=0, parse=int)
    signal_text = _require(_setting(args, config, "signal"), "signal")
    seeds = _require(_setting(args, config, "seeds", parse=parse_seeds), "seeds")
    if isinstance(seeds, str):
        seeds = parse_seeds(seeds)
    precision = _setting(args, config, "precision", default="complex128")

    grid = make_grid(L=L, delta=delta, T=T, margin=margin)
    model = parse_signal(signal_text, sigma=sigma)
    out = Path(_require(_setting(args, config, "out"), "out"))
    out.mkdir(parents=True, exist_ok=True)

    cfg = {
        "cmd": "simulate", "L": L, "delta": delta, "T": T, "sigma": sigma,
        "margin": margin, "signal": model.descriptor(), "precision": precision,
    }
    h = config_hash(cfg)
    token = f"{model.kind.value}_A{model.A:g}_d{spacing_token(delta)}"
    files = []
    for seed in seeds:
        noise = draw_noise(grid, sigma, seed)
        fld = synthesize_field(noise, model, grid)
        path = out / f"field_{token}_s{seed}.wfield"
        write_field(fld, path, precision=precision)
        files.append(path.name)
    manifest = {"config": cfg, "hash": h, "seeds": seeds, "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    print(f"wrote {len(files)} field cache(s) to {out} (config {h})")
    return 0


def _iter_fields(fields_dir):
    paths = sorted(Path(fields_dir).glob("*.wfield"))
    if not paths:
        raise DataError(f"no .wfield caches in {fields_dir}")
    return paths


def _parse_methods(text: str):
    names = [tok.strip().lower() for tok in text.split(",") if tok.strip()]
    bad = [n for n in names if n not in _DETECTORS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {sorted(_DETECTORS)}")
    return names


def _parse_levels(text: str) -> list[int]:
    try:
        levels = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse levels {text!r}") from None
    if any(j < 0 for j in levels):
        raise ConfigError("subsampling levels must be >= 0")
    return levels


def _ladder(field, max_level: int):
    """Fields at successively doubled spacing, by subsampling only."""
    out = {0: field}
    cur = field
    for j in range(1, max_level + 1):
        cur = subsample(cur)
        out[j] = cur
    return out


def cmd_detect(args) -> int:
    config = read_config_file(args.config) if args.config else {}
    methods = _parse_methods(_setting(args, config, "methods", default="amn,mgn,st"))
    levels = _parse_levels(_setting(args, config, "levels", default="0"))
    out = Path(_require(_setting(args, config, "out"), "out"))
    out.mkdir(parents=True, exist_ok=True)
    fields_dir = _require(_setting(args, config, "fields"), "fields")
    target = _setting(args, config, "target", parse=float)

    n_csv = 0
    for path in _iter_fields(fields_dir):
        field = read_field(path)
        W = target if target is not None else field.grid.L - 1.0
        cfg = {"cmd": "detect", "source": path.name, "target": W,
               "methods": ",".join(methods), "levels": ",".join(map(str, levels))}
        h = config_hash(cfg)
        for j, fld in _ladder(field, max(levels)).items():
            if j not in levels:
                continue
            for name in methods:
                ps = _DETECTORS[name](fld, W)
                token = spacing_token(fld.grid.delta)
                seed = "x" if ps.seed is None else ps.seed
                csv_path = out / f"points_{name}_d{token}_s{seed}.csv"
                det.write_pointset_csv(ps, csv_path, meta={"config": h, "source": path.name})
                n_csv += 1
    print(f"wrote {n_csv} point-set CSV(s) to {out}")
    return 0


def cmd_stats(args) -> int:
    config = read_config_file(args.config) if args.config else {}
    points_dir = _require(_setting(args, config, "points"), "points")
    signal_text = _require(_setting(args, config, "signal"), "signal")
    sigma = _setting(args, config, "sigma", default=1.0, parse=float)
    boxes = [float(tok) for tok in str(_setting(args, config, "boxes", default="1,2,3")).split(",")]
    out = _require(_setting(args, config, "out"), "out")

    model = parse_signal(signal_text, sigma=sigma)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    paths = sorted(Path(points_dir).glob("*.csv"))
    if not paths:
        raise DataError(f"no point-set CSVs in {points_dir}")
    groups: dict[tuple[str, float], list] = {}
    for p in paths:
        ps = det.read_pointset_csv(p)
        groups.setdefault((ps.method.value, ps.delta), []).append(ps)

    cfg = {"cmd": "stats", "signal": model.descriptor(), "sigma": sigma,
           "boxes": ",".join(map(str, boxes))}
    h = config_hash(cfg)
    rows = []
    for (method, delta), sets in sorted(groups.items()):
        step = min(delta, 1.0 / 64.0)
        for w in boxes:
            for est_name, fn in (
                ("intensity", lambda ps: st_mod.intensity_estimator(ps, w)),
                ("count_error",
                 lambda ps: st_mod.count_error_estimator(ps, model, sigma, w, step=step)),
            ):
                vals = [fn(ps) for ps in sets]
                n = len(vals)
                mean = sum(vals) / n
                var = sum((v - mean) ** 2 for v in vals) / (n - 1) if n > 1 else 0.0
                std = math.sqrt(var)
                rows.append(st_mod.StatRow(
                    estimator=f"{est_name}[{method}]", signal=model.descriptor(),
                    A=model.A, sigma=sigma, delta=delta, halfwidth=w, R=n,
                    mean=mean, std=std, se=std / math.sqrt(n),
                ))
    st_mod.write_stats_csv(rows, out, meta={"config": h})
    for r in rows:
        print(f"{r.estimator:22s} delta={r.delta:<10g} box={r.halfwidth:g} "
              f"R={r.R} mean={r.mean:+.5f} std={r.std:.5f} se={r.se:.5f}")
    print(f"wrote {out}")
    return 0


def cmd_consistency(args) -> int:
    config = read_config_file(args.config) if args.config else {}
    fields_dir = _require(_setting(args, config, "fields"), "fields")
    methods = _parse_methods(_setting(args, config, "methods", default="amn,mgn,st"))
    levels = _parse_levels(_setting(args, config, "levels", default="1,2,3"))
    proxy_name = _setting(args, config, "proxy", default="amn").lower()
    out = Path(_require(_setting(args, config, "out"), "out"))
    out.parent.mkdir(parents=True, exist_ok=True)
    if proxy_name not in ("amn", "mgn"):
        raise ConfigError(f"proxy must be amn or mgn, got {proxy_name!r}")
    if 0 in levels:
        raise ConfigError("consistency levels start at 1 (level 0 is the proxy itself)")

    rows = []
    for path in _iter_fields(fields_dir):
        field = read_field(path)
        W = field.grid.L - 1.0
        z_hi = _DETECTORS[proxy_name](field, W)
        ladder = _ladder(field, max(levels))
        for j in levels:
            fld = ladder[j]
            for name in methods:
                z_lo = _DETECTORS[name](fld, W)
                match = cons.greedy_match(z_hi, z_lo, fld.grid.delta)
                rows.append(cons.ConsistencyRow(
                    seed=field.seed, method=name.upper(),
                    delta_hi=field.grid.delta, delta_lo=fld.grid.delta,
                    n_hi=len(z_hi), n_lo=len(z_lo),
                    certificate=match.certificate,
                    max_distortion=match.max_distortion,
                ))
    cfg = {"cmd": "consistency", "proxy": proxy_name,
           "methods": ",".join(methods), "levels": ",".join(map(str, levels))}
    h = config_hash(cfg)
    cons.write_consistency_csv(rows, out, meta={"config": h})

    deltas, names, table = cons.aggregate_failure_table(rows)
    agg_path = out.with_name(out.stem + "_aggregate" + out.suffix)
    with open(agg_path, "w", newline="") as fh:
        fh.write(f"# config={h}\n")
        fh.write("delta," + ",".join(names) + "\n")
        for d in deltas:
            cells = [f"{table.get((d, m), float('nan')):.4f}" for m in names]
            fh.write(f"{d!r}," + ",".join(cells) + "\n")
    print("failure probability p(delta, method):")
    print("  delta      " + "  ".join(f"{m:>6s}" for m in names))
    for d in deltas:
        cells = "  ".join(f"{table.get((d, m), float('nan')):6.3f}" for m in names)
        print(f"  {d:<9g}  {cells}")
    print(f"wrote {out} and {agg_path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bargzeros",
        description="Simulate noisy Bargmann-transform fields, detect their "
                    "zeros, and validate the detected point process.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="draw seeded field realizations into a cache dir")
    sim.add_argument("--config", help="key = value file; flags override it")
    sim.add_argument("--L", type=float)
    sim.add_argument("--delta", type=parse_spacing, help="grid spacing, e.g. 2^-6")
    sim.add_argument("--T", type=float)
    sim.add_argument("--sigma", type=float)
    sim.add_argument("--margin", type=int)
    sim.add_argument("--signal", help="zero | gauss:A=<a> | hermite1:A=<a>")
    sim.add_argument("--seeds", type=parse_seeds, help="e.g. 0..99 or 3,5,8")
    sim.add_argument("--precision", choices=["complex64", "complex128"])
    sim.add_argument("--out")
    sim.set_defaults(fn=cmd_simulate)

    dt = sub.add_parser("detect", help="run detectors over a subsampling ladder")
    dt.add_argument("--config")
    dt.add_argument("--fields", help="directory of .wfield caches")
    dt.add_argument("--methods", help="comma list from amn,mgn,st")
    dt.add_argument("--levels", help="subsampling levels, e.g. 0,1,2")
    dt.add_argument("--target", type=float, help="target box halfwidth (default L-1)")
    dt.add_argument("--out")
    dt.set_defaults(fn=cmd_detect)

    stc = sub.add_parser("stats", help="aggregate estimators over detection CSVs")
    stc.add_argument("--config")
    stc.add_argument("--points", help="directory of point-set CSVs")
    stc.add_argument("--signal")
    stc.add_argument("--sigma", type=float)
    stc.add_argument("--boxes", help="comma list of box halfwidths")
    stc.add_argument("--out")
    stc.set_defaults(fn=cmd_stats)

    cns = sub.add_parser("consistency", help="failure table against the hi-res proxy")
    cns.add_argument("--config")
    cns.add_argument("--fields")
    cns.add_argument("--methods")
    cns.add_argument("--levels", help="subsampling levels >= 1")
    cns.add_argument("--proxy", help="amn (default) or mgn")
    cns.add_argument("--out")
    cns.set_defaults(fn=cmd_consistency)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (DataError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
