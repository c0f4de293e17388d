"""Config files, parameter sweeps, CSV output, and plot-script emission.

This is the only layer that speaks dB; everything below works in linear
scale.  Sweeps produce one CSV row per (sweep point, engine), with a
fixed header and 10-significant-digit formatting so output files diff
cleanly.  Plots are emitted as standalone matplotlib scripts rather than
images, keeping this package free of plotting dependencies and the
artifacts byte-reproducible.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .analytic import evaluate
from .linklevel import Geometry, SystemConfig, derive_geometry
from .mcsim import McConfig, estimate

CSV_COLUMNS = ("gamma0_db", "m", "n", "engine", "mode",
               "p_out_n", "p_out_m", "stderr_n", "stderr_m", "throughput")

SWEEP_VARIABLES = ("gamma0_db", "pair", "distance-set")
ENGINES = ("analytic", "mc")
OUTPUTS = ("p_out_n", "p_out_m", "throughput")

_CONFIG_KEYS = {
    "system": ("M", "m", "n", "a_m", "a_n", "theta", "lambda_sd", "lambda_dnr",
               "lambda_rdm", "R_m", "R_n"),
    "geometry": ("d_sdn", "d_sdm", "d_dnr", "alpha1_deg", "alpha2_deg"),
    "mc": ("trials", "seed", "chunk_size", "mode"),
    "sweep": ("variable", "values", "engines", "baseline", "outputs", "gamma0_db"),
}

# Scenario defaults: 6 users, pair (3, 6) with the 0.7/0.3 power split,
# unit rates, free-space-like path loss, unit mean gains, and the node
# layout d_sdn=4 m, d_sdm=6 m, d_dnr=4 m with 40/60-degree opening angles.
_DEFAULTS = {
    "system": {"M": "6", "m": "3", "n": "6", "a_m": "0.7", "a_n": "0.3", "theta": "2",
               "lambda_sd": "1", "lambda_dnr": "1", "lambda_rdm": "1", "R_m": "1", "R_n": "1"},
    "geometry": {"d_sdn": "4", "d_sdm": "6", "d_dnr": "4",
                 "alpha1_deg": "40", "alpha2_deg": "60"},
    "mc": {"trials": "100000", "seed": "12345", "chunk_size": "65536", "mode": "independent"},
    "sweep": {"variable": "gamma0_db", "values": "0,5,10,15,20,25,30,35,40",
              "engines": "analytic,mc", "baseline": "false",
              "outputs": "p_out_n,p_out_m,throughput", "gamma0_db": "20"},
}


def db_to_linear(db: float) -> float:
    """Power ratio from decibels."""
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep, with which engines, and which outputs to plot.

    values holds floats (variable="gamma0_db", the SNR grid in dB),
    (m, n) rank pairs (variable="pair"), or (d_sdn, d_sdm, d_dnr)
    triples (variable="distance-set").  Pair and distance sweeps run at
    the fixed SNR ``gamma0_db``.  ``baseline`` adds non-relaying
    companion rows per engine.
    """

    variable: str
    values: tuple
    engines: tuple[str, ...] = ("analytic", "mc")
    outputs: tuple[str, ...] = OUTPUTS
    baseline: bool = False
    gamma0_db: float = 20.0

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}, "
                             f"got {self.variable!r}")
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        object.__setattr__(self, "values", tuple(self.values))
        if self.variable == "gamma0_db":
            if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in self.values):
                raise ValueError(f"gamma0_db sweep values must be finite reals, "
                                 f"got {self.values}")
        engines = tuple(e for e in ENGINES if e in self.engines)
        if len(set(self.engines)) != len(engines) or not engines:
            bad = set(self.engines) - set(ENGINES) or "empty set"
            raise ValueError(f"engines must be a non-empty subset of {ENGINES}, got {bad}")
        object.__setattr__(self, "engines", engines)
        outputs = tuple(o for o in OUTPUTS if o in self.outputs)
        if len(set(self.outputs)) != len(outputs) or not outputs:
            bad = set(self.outputs) - set(OUTPUTS) or "empty set"
            raise ValueError(f"outputs must be a non-empty subset of {OUTPUTS}, got {bad}")
        object.__setattr__(self, "outputs", outputs)
        if not (isinstance(self.gamma0_db, (int, float)) and math.isfinite(self.gamma0_db)):
            raise ValueError(f"gamma0_db must be a finite real, got {self.gamma0_db!r}")


ConfigBundle = tuple[SystemConfig, Geometry, McConfig, SweepSpec]


def _parse_scalar(section: str, key: str, raw: str, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return raw.strip()
    except (TypeError, ValueError):
        raise ValueError(f"config key [{section}] {key}: cannot parse {raw!r} "
                         f"as {kind.__name__}") from None


def _parse_values(variable: str, raw: str) -> tuple:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ValueError("config key [sweep] values: empty value list")
    try:
        if variable == "gamma0_db":
            return tuple(float(s) for s in items)
        if variable == "pair":
            pairs = []
            for s in items:
                m_s, n_s = s.split(":")
                pairs.append((int(m_s), int(n_s)))
            return tuple(pairs)
        triples = []
        for s in items:
            a, b, c = s.split(":")
            triples.append((float(a), float(b), float(c)))
        return tuple(triples)
    except ValueError as exc:
        raise ValueError(f"config key [sweep] values: cannot parse {raw!r} "
                         f"for variable {variable!r} ({exc})") from None


def _first_gamma0_db(sweep: SweepSpec) -> float:
    return float(sweep.values[0]) if sweep.variable == "gamma0_db" else sweep.gamma0_db


def load_config(path: str | Path | None) -> ConfigBundle:
    """Load a scenario from an INI-style file, filling defaults for omitted keys.

    ``path=None`` yields the full default scenario.  Unknown sections or
    keys, unparseable values, and invariant violations all raise
    ValueError naming the offending key; a missing file raises
    FileNotFoundError.
    """
    merged = {sec: dict(kv) for sec, kv in _DEFAULTS.items()}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        parser.optionxform = str  # [system] M and m are distinct keys
        try:
            parser.read_string(path.read_text(), source=str(path))
        except configparser.Error as exc:
            raise ValueError(f"config file {path}: {exc}") from None
        for section in parser.sections():
            if section not in _CONFIG_KEYS:
                raise ValueError(f"config file {path}: unknown section [{section}]")
            for key, raw in parser.items(section):
                if key not in _CONFIG_KEYS[section]:
                    raise ValueError(f"config file {path}: unknown key [{section}] {key}")
                merged[section][key] = raw

    sy, ge, mc_s, sw = (merged[s] for s in ("system", "geometry", "mc", "sweep"))
    variable = _parse_scalar("sweep", "variable", sw["variable"], str)
    sweep = SweepSpec(
        variable=variable,
        values=_parse_values(variable, sw["values"]),
        engines=tuple(s.strip() for s in sw["engines"].split(",") if s.strip()),
        outputs=tuple(s.strip() for s in sw["outputs"].split(",") if s.strip()),
        baseline=_parse_scalar("sweep", "baseline", sw["baseline"], bool),
        gamma0_db=_parse_scalar("sweep", "gamma0_db", sw["gamma0_db"], float),
    )
    cfg = SystemConfig(
        M=_parse_scalar("system", "M", sy["M"], int),
        m=_parse_scalar("system", "m", sy["m"], int),
        n=_parse_scalar("system", "n", sy["n"], int),
        a_m=_parse_scalar("system", "a_m", sy["a_m"], float),
        a_n=_parse_scalar("system", "a_n", sy["a_n"], float),
        gamma0=db_to_linear(_first_gamma0_db(sweep)),
        theta=_parse_scalar("system", "theta", sy["theta"], float),
        lambda_sd=_parse_scalar("system", "lambda_sd", sy["lambda_sd"], float),
        lambda_dnr=_parse_scalar("system", "lambda_dnr", sy["lambda_dnr"], float),
        lambda_rdm=_parse_scalar("system", "lambda_rdm", sy["lambda_rdm"], float),
        R_m=_parse_scalar("system", "R_m", sy["R_m"], float),
        R_n=_parse_scalar("system", "R_n", sy["R_n"], float),
    )
    geo = derive_geometry(
        d_sdn=_parse_scalar("geometry", "d_sdn", ge["d_sdn"], float),
        d_sdm=_parse_scalar("geometry", "d_sdm", ge["d_sdm"], float),
        d_dnr=_parse_scalar("geometry", "d_dnr", ge["d_dnr"], float),
        alpha1=math.radians(_parse_scalar("geometry", "alpha1_deg", ge["alpha1_deg"], float)),
        alpha2=math.radians(_parse_scalar("geometry", "alpha2_deg", ge["alpha2_deg"], float)),
    )
    mc = McConfig(
        trials=_parse_scalar("mc", "trials", mc_s["trials"], int),
        seed=_parse_scalar("mc", "seed", mc_s["seed"], int),
        chunk_size=_parse_scalar("mc", "chunk_size", mc_s["chunk_size"], int),
        mode=_parse_scalar("mc", "mode", mc_s["mode"], str),
    )
    return cfg, geo, mc, sweep


def _degrees_for_file(rad: float) -> float:
    """Degrees value whose radians() round-trips to exactly ``rad`` when possible.

    math.degrees/math.radians are each one rounding, so the naive
    composition can be off by an ulp; nudging the degree value a few ulps
    recovers exactness whenever the angle originally came from degrees.
    """
    deg = math.degrees(rad)
    if math.radians(deg) == rad:
        return deg
    for steps in range(1, 5):
        for target in (math.inf, -math.inf):
            cand = deg
            for _ in range(steps):
                cand = math.nextafter(cand, target)
            if math.radians(cand) == rad:
                return cand
    return deg


def _format_values(sweep: SweepSpec) -> str:
    if sweep.variable == "gamma0_db":
        return ",".join(repr(float(v)) for v in sweep.values)
    if sweep.variable == "pair":
        return ",".join(f"{m}:{n}" for m, n in sweep.values)
    return ",".join(f"{a!r}:{b!r}:{c!r}" for a, b, c in sweep.values)


def write_config(path: str | Path, cfg: SystemConfig, geo: Geometry, mc: McConfig,
                 sweep: SweepSpec) -> None:
    """Serialize a scenario losslessly; load_config(write_config(c)) == c."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser["system"] = {
        "M": repr(cfg.M), "m": repr(cfg.m), "n": repr(cfg.n),
        "a_m": repr(cfg.a_m), "a_n": repr(cfg.a_n), "theta": repr(cfg.theta),
        "lambda_sd": repr(cfg.lambda_sd), "lambda_dnr": repr(cfg.lambda_dnr),
        "lambda_rdm": repr(cfg.lambda_rdm), "R_m": repr(cfg.R_m), "R_n": repr(cfg.R_n),
    }
    parser["geometry"] = {
        "d_sdn": repr(geo.d_sdn), "d_sdm": repr(geo.d_sdm), "d_dnr": repr(geo.d_dnr),
        "alpha1_deg": repr(_degrees_for_file(geo.alpha1)),
        "alpha2_deg": repr(_degrees_for_file(geo.alpha2)),
    }
    parser["mc"] = {"trials": repr(mc.trials), "seed": repr(mc.seed),
                    "chunk_size": repr(mc.chunk_size), "mode": mc.mode}
    parser["sweep"] = {"variable": sweep.variable, "values": _format_values(sweep),
                       "engines": ",".join(sweep.engines),
                       "outputs": ",".join(sweep.outputs),
                       "baseline": "true" if sweep.baseline else "false",
                       "gamma0_db": repr(float(sweep.gamma0_db))}
    with Path(path).open("w") as fh:
        parser.write(fh)


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.10g}"


def _point_scenario(cfg: SystemConfig, geo: Geometry, sweep: SweepSpec, value):
    """Specialize (cfg, geo) for one sweep value; returns (db, cfg, geo)."""
    if sweep.variable == "gamma0_db":
        db = float(value)
        return db, replace(cfg, gamma0=db_to_linear(db)), geo
    db = sweep.gamma0_db
    cfg = replace(cfg, gamma0=db_to_linear(db))
    if sweep.variable == "pair":
        return db, replace(cfg, m=value[0], n=value[1]), geo
    d_sdn, d_sdm, d_dnr = value
    return db, cfg, derive_geometry(d_sdn, d_sdm, d_dnr, geo.alpha1, geo.alpha2)


def _rows_for_point(cfg: SystemConfig, geo: Geometry, mc: McConfig, sweep: SweepSpec,
                    value, mc_workers: int) -> list[dict]:
    db, cfg_i, geo_i = _point_scenario(cfg, geo, sweep, value)
    variants = [(engine, relay)
                for engine in sweep.engines
                for relay in ((True, False) if sweep.baseline else (True,))]
    rows = []
    for engine, relay in variants:
        name = engine if relay else engine + "-norelay"
        base = {"gamma0_db": _fmt(db), "m": str(cfg_i.m), "n": str(cfg_i.n), "engine": name}
        if engine == "analytic":
            point = evaluate(cfg_i, geo_i, relay=relay)
            rows.append(base | {"mode": "", "p_out_n": _fmt(point.p_out_n),
                                "p_out_m": _fmt(point.p_out_m), "stderr_n": "", "stderr_m": "",
                                "throughput": _fmt(point.throughput)})
        else:
            est_n, est_m, tau = estimate(cfg_i, geo_i, mc, workers=mc_workers, relay=relay)
            rows.append(base | {"mode": mc.mode, "p_out_n": _fmt(est_n.p_hat),
                                "p_out_m": _fmt(est_m.p_hat), "stderr_n": _fmt(est_n.stderr),
                                "stderr_m": _fmt(est_m.stderr), "throughput": _fmt(tau)})
    return rows


def run_sweep(cfg: SystemConfig, geo: Geometry, mc: McConfig, sweep: SweepSpec, *,
              mc_workers: int = 1, point_workers: int = 4) -> list[dict]:
    """Evaluate every sweep point with every requested engine.

    Returns CSV-ready rows (string values, CSV_COLUMNS keys), ordered by
    sweep index then engine, independent of dispatch concurrency.
    Engine errors propagate annotated with the offending sweep point.
    """

    def one_point(value):
        try:
            return _rows_for_point(cfg, geo, mc, sweep, value, mc_workers)
        except (ValueError, ArithmeticError) as exc:
            raise type(exc)(f"sweep point {sweep.variable}={value!r}: {exc}") from exc

    if point_workers > 1 and len(sweep.values) > 1:
        with ThreadPoolExecutor(max_workers=point_workers) as pool:
            per_point = list(pool.map(one_point, sweep.values))
    else:
        per_point = [one_point(v) for v in sweep.values]
    return [row for rows in per_point for row in rows]


def write_csv(rows: list[dict], path: str | Path) -> None:
    """Write sweep rows with the fixed header; newline-strict for stable bytes."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _read_rows(csv_path: Path) -> list[dict]:
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{csv_path}: empty CSV, no header line") from None
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{csv_path} line 1: header {header!r} does not match "
                             f"{list(CSV_COLUMNS)}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(CSV_COLUMNS):
                raise ValueError(f"{csv_path} line {lineno}: expected "
                                 f"{len(CSV_COLUMNS)} fields, got {len(record)}")
            row = dict(zip(CSV_COLUMNS, record))
            try:
                float(row["gamma0_db"]), int(row["m"]), int(row["n"])
                for col in ("p_out_n", "p_out_m", "throughput"):
                    float(row[col])
            except ValueError:
                raise ValueError(f"{csv_path} line {lineno}: non-numeric field "
                                 f"in {record!r}") from None
            rows.append(row)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")
    return rows


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Render outage/throughput figures from {csv_name} (auto-generated)."""

import csv
import math
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
OUTPUTS = {outputs!r}

series = defaultdict(list)
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        key = (row["engine"], row["mode"], int(row["m"]), int(row["n"]))
        series[key].append(row)

def style(engine):
    mc_like = engine.startswith("mc")
    base = dict(linestyle="--" if engine.endswith("norelay") else "-")
    if mc_like:
        base = dict(linestyle="none", marker="s" if engine.endswith("norelay") else "o",
                    fillstyle="none")
    return base

def save(metric, ylabel, fname, logscale):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for key in sorted(series):
        engine, mode, m, n = key
        rows = sorted(series[key], key=lambda r: float(r["gamma0_db"]))
        x = [float(r["gamma0_db"]) for r in rows]
        y = [float(r[metric]) for r in rows]
        if logscale:
            x = [xi for xi, yi in zip(x, y) if yi > 0]
            y = [yi for yi in y if yi > 0]
        if not x:
            continue
        label = f"{{engine}} (m={{m}}, n={{n}})" + (f" [{{mode}}]" if mode else "")
        ax.plot(x, y, label=label, **style(engine))
    if logscale:
        ax.set_yscale("log")
    ax.set_xlabel("transmit SNR (dB)")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(fname, dpi=150)
    plt.close(fig)
    print(f"wrote {{fname}}")

for metric in ("p_out_n", "p_out_m"):
    if metric in OUTPUTS:
        save(metric, f"outage probability ({{metric[-1]}})",
             f"{stem}_{{metric}}.png", logscale=True)
if "throughput" in OUTPUTS:
    save("throughput", "sum throughput (bit/s/Hz)", "{stem}_throughput.png", logscale=False)
'''


def emit_plot_script(csv_path: str | Path, outputs: tuple[str, ...] = OUTPUTS) -> str:
    """Generate a standalone matplotlib script for a run_sweep CSV.

    Analytic engines render as lines, MC engines as hollow markers;
    outage axes are logarithmic.  The CSV is validated up front so a
    malformed file fails here, with a line number, rather than at plot
    time.
    """
    csv_path = Path(csv_path)
    _read_rows(csv_path)
    return _PLOT_TEMPLATE.format(csv_name=csv_path.name, csv_path=str(csv_path),
                                 outputs=tuple(outputs), stem=csv_path.stem)


def _parse_sweep_range(text: str) -> tuple[float, ...]:
    try:
        start_s, stop_s, step_s = text.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError:
        raise ValueError(f"--sweep-gamma0-db expects START:STOP:STEP, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ValueError(f"--sweep-gamma0-db needs step > 0 and stop >= start, got {text!r}")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        values.append(v)
        k += 1
    return tuple(values)


def main(argv: list[str] | None = None) -> int:
    """Console entry point; returns a process exit code."""
    ap = argparse.ArgumentParser(
        prog="coopnoma",
        description="Sweep outage probability and throughput for a relay-assisted "
                    "NOMA pairing, with analytic and Monte-Carlo engines.")
    ap.add_argument("--config", metavar="PATH", help="INI scenario file (defaults used when omitted)")
    ap.add_argument("--sweep-gamma0-db", metavar="START:STOP:STEP",
                    help="override the sweep with an SNR grid in dB")
    ap.add_argument("--trials", type=int, metavar="N", help="Monte-Carlo trials per point")
    ap.add_argument("--seed", type=int, metavar="N", help="Monte-Carlo seed")
    ap.add_argument("--engine", choices=("analytic", "mc", "both"), help="engine selection")
    ap.add_argument("--mode", choices=("joint", "independent"), help="MC pairing mode")
    ap.add_argument("--baseline", action="store_true",
                    help="add non-relaying baseline rows")
    ap.add_argument("--out", metavar="CSV_PATH", default="sweep.csv", help="output CSV path")
    ap.add_argument("--plot", metavar="SCRIPT_PATH", help="also emit a plot script here")
    args = ap.parse_args(argv)

    try:
        cfg, geo, mc, sweep = load_config(args.config)
        if args.sweep_gamma0_db is not None:
            sweep = replace(sweep, variable="gamma0_db",
                            values=_parse_sweep_range(args.sweep_gamma0_db))
        if args.trials is not None:
            mc = replace(mc, trials=args.trials)
        if args.seed is not None:
            mc = replace(mc, seed=args.seed)
        if args.mode is not None:
            mc = replace(mc, mode=args.mode)
        if args.engine is not None:
            sweep = replace(sweep, engines=ENGINES if args.engine == "both" else (args.engine,))
        if args.baseline:
            sweep = replace(sweep, baseline=True)
        cfg = replace(cfg, gamma0=db_to_linear(_first_gamma0_db(sweep)))

        rows = run_sweep(cfg, geo, mc, sweep, mc_workers=4, point_workers=4)
        write_csv(rows, args.out)
        print(f"wrote {args.out} ({len(rows)} rows)")
        if args.plot:
            Path(args.plot).write_text(emit_plot_script(args.out, outputs=sweep.outputs))
            print(f"wrote {args.plot}")
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
