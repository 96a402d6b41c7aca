"""Campaign orchestration and command-line interface.

Subcommands:

  run      execute a (model, L, p) campaign from a config file or preset
  analyze  turn a campaign's observable tables into critical-point estimates
  oracle   exact small-instance validation suites
  report   analysis plus human-readable summary and figures (if the figure
           package is installed)
  presets  list or dump named parameter sets

A campaign directory contains ``manifest.json`` (the validated config), one
subdirectory per (L, p) with per-disorder-sample run records (JSON + CSV),
``observables.csv`` with disorder-averaged tables, and ``results.json``.
Sample seeds derive deterministically from the master seed, so reruns and
any worker count produce byte-identical outputs.

Exit codes: 0 success, 2 invalid config/arguments, 3 runtime or suite
failure, 4 completed with non-equilibrated samples.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import analysis as ana
from . import oracle as orc
from .complexes import ChainKind, build_bcc_complex, build_cubic_complex, to_chain_complex
from .mc import RunSchedule, build_ladder, load_run_record, run_pt, save_run_record
from .models import CHAIN_FOR_KIND, ModelKind, compile_model, sample_disorder
from .presets import PRESETS, get_preset, ladder_row

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_NOT_EQUILIBRATED = 4

OUT_ROOT_ENV = "RCIM_OUT_ROOT"


class ConfigError(ValueError):
    pass


# --- configuration -----------------------------------------------------------


def normalize_config(cfg: dict) -> dict:
    """Validate a campaign config and fill defaults; raises ConfigError with
    the first offending field. Every (L, p) row is checked against module
    preconditions before any work starts."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    out = dict(cfg)
    if out.get("schema") != 1:
        raise ConfigError(f"unsupported config schema {out.get('schema')!r} (expected 1)")
    try:
        kind = ModelKind(out.get("model"))
    except ValueError:
        raise ConfigError(f"unknown model {out.get('model')!r}") from None
    if kind == ModelKind.GENERIC:
        raise ConfigError("campaigns require a lattice-backed model")
    sizes = out.get("L")
    if not isinstance(sizes, list) or not sizes:
        raise ConfigError("L must be a non-empty list of system sizes")
    for L in sizes:
        if not isinstance(L, int) or L < 2:
            raise ConfigError(f"L must be integers >= 2, got {L!r}")
        if kind != ModelKind.RPIM and L % 2:
            raise ConfigError(f"L={L} is odd; the bcc complex needs even L")
    ps = out.get("p")
    if not isinstance(ps, list) or not ps:
        raise ConfigError("p must be a non-empty list of disorder strengths")
    for p in ps:
        if not isinstance(p, (int, float)) or not 0.0 <= p <= 0.5:
            raise ConfigError(f"disorder strength must lie in [0, 0.5], got {p!r}")
    ladder = dict(out.get("ladder") or {})
    mode = ladder.setdefault("mode", "geometric")
    if mode not in ("geometric", "explicit", "adaptive"):
        raise ConfigError(f"unknown ladder mode {mode!r}")
    if mode == "explicit":
        temps = ladder.get("temps")
        if not temps or list(temps) != sorted(temps) or min(temps) <= 0:
            raise ConfigError("explicit ladder needs increasing positive temps")
    else:
        if "n_t" in ladder and ladder["n_t"] < 2:
            raise ConfigError("ladder needs n_t >= 2")
        if "t_min" in ladder and "t_max" in ladder and not (0 < ladder["t_min"] < ladder["t_max"]):
            raise ConfigError("ladder needs 0 < t_min < t_max")
    out["ladder"] = ladder
    tau = out.get("tau")
    if not isinstance(tau, int) or tau < 1:
        raise ConfigError(f"tau must be an integer >= 1, got {tau!r}")
    out.setdefault("measure_sweeps", None)
    out.setdefault("stride", 1)
    out.setdefault("n_disorder", 1)
    out.setdefault("seed", 0)
    out.setdefault("workers", 1)
    out.setdefault("start", "random")
    out.setdefault("max_loop", None)
    out.setdefault("checkpoint_interval", 4096)
    if out["stride"] < 1 or out["n_disorder"] < 1 or out["workers"] < 1:
        raise ConfigError("stride, n_disorder and workers must be >= 1")
    if out["start"] not in ("random", "up"):
        raise ConfigError(f"start must be 'random' or 'up', got {out['start']!r}")
    # exercise one schedule so bad combinations fail before any work
    RunSchedule(tau=tau, measure_sweeps=out["measure_sweeps"], stride=out["stride"])
    return out


def load_config(path) -> dict:
    with open(path) as fh:
        return normalize_config(yaml.safe_load(fh))


def save_config(cfg: dict, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=True)


def resolve_out_dir(out, default_name: str) -> Path:
    root = os.environ.get(OUT_ROOT_ENV)
    path = Path(out) if out else Path(default_name)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


# --- campaign execution --------------------------------------------------------

_COMPLEX_CACHE: dict = {}


def _lattice_for(kind: ModelKind, L: int):
    key = (kind == ModelKind.RPIM, L)
    if key not in _COMPLEX_CACHE:
        builder = build_cubic_complex if key[0] else build_bcc_complex
        _COMPLEX_CACHE[key] = builder(L)
    return _COMPLEX_CACHE[key]


def sample_seeds(master: int, L: int, p: float, k: int) -> tuple[int, int]:
    """(disorder_seed, run_seed), stable in the campaign coordinates only."""
    ss = np.random.SeedSequence([int(master), int(L), int(round(p * 1e9)), int(k)])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def pair_dir(out_dir: Path, L: int, p: float) -> Path:
    return Path(out_dir) / f"L{L}_p{p:.4f}"


def _ladder_for(cfg: dict, kind: ModelKind, p: float):
    lad = cfg["ladder"]
    if lad["mode"] == "explicit":
        return build_ladder(0, 0, 0, "explicit", temps=lad["temps"])
    row = ladder_row(kind.value, p)
    t_min = lad.get("t_min", row["t_min"])
    t_max = lad.get("t_max", row["t_max"])
    n_t = lad.get("n_t", row["n_t"])
    return build_ladder(t_min, t_max, n_t, "geometric")


def run_sample(cfg: dict, out_dir, L: int, p: float, k: int) -> dict:
    """Run (or resume) one disorder sample and write its record; returns a
    small status dict. Skips work when the record already exists."""
    kind = ModelKind(cfg["model"])
    pdir = pair_dir(out_dir, L, p)
    pdir.mkdir(parents=True, exist_ok=True)
    base = pdir / f"sample{k:04d}"
    if base.with_suffix(".json").exists():
        record = load_run_record(base)
        return {"L": L, "p": p, "k": k, "skipped": True,
                "equilibrated": record.meta["equilibration"]["flag"]}
    disorder_seed, run_seed = sample_seeds(cfg["seed"], L, p, k)
    lattice = _lattice_for(kind, L)
    chain = to_chain_complex(lattice, CHAIN_FOR_KIND[kind])
    disorder = sample_disorder(chain, p, disorder_seed)
    model = compile_model(chain, disorder, kind)
    ladder = _ladder_for(cfg, kind, p)
    schedule = RunSchedule(
        tau=cfg["tau"],
        measure_sweeps=cfg["measure_sweeps"],
        stride=cfg["stride"],
        checkpoint_interval=cfg["checkpoint_interval"],
        seed=run_seed,
    )
    from .observables import plan_for_model

    plan = plan_for_model(model, max_loop=cfg["max_loop"])
    ckpt = pdir / f"sample{k:04d}.ckpt"
    resume_from = str(ckpt) if ckpt.exists() else None
    record = run_pt(
        model,
        ladder,
        schedule,
        plan=plan,
        start=cfg["start"],
        resume_from=resume_from,
        checkpoint_path=str(ckpt),
        extra_meta={"campaign": {"L": L, "p": p, "sample": k}},
    )
    save_run_record(record, base)
    if ckpt.exists():
        ckpt.unlink()
    return {"L": L, "p": p, "k": k, "skipped": False,
            "equilibrated": record.meta["equilibration"]["flag"]}


def _run_sample_star(args):
    return run_sample(*args)


def run_campaign(cfg: dict, out_dir, workers: int | None = None, echo=print) -> dict:
    """Execute every (L, p, sample) work item, then aggregate observables."""
    cfg = normalize_config(cfg)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    manifest_cfg = {k: v for k, v in cfg.items() if k != "workers"}  # execution detail
    if manifest_path.exists():
        with open(manifest_path) as fh:
            existing = json.load(fh)["config"]
        if existing != _jsonable(manifest_cfg):
            raise ConfigError(
                f"{out_dir} already holds a campaign with a different config; "
                "use a fresh directory or matching config to resume"
            )
    else:
        with open(manifest_path, "w") as fh:
            json.dump({"schema": 1, "config": _jsonable(manifest_cfg)}, fh, sort_keys=True, indent=1)
            fh.write("\n")

    items = [
        (cfg, out_dir, L, p, k)
        for L in cfg["L"]
        for p in cfg["p"]
        for k in range(cfg["n_disorder"])
    ]
    workers = cfg["workers"] if workers is None else workers
    statuses = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for status in pool.map(_run_sample_star, items):
                statuses.append(status)
                echo(_fmt_status(status))
    else:
        for item in items:
            status = _run_sample_star(item)
            statuses.append(status)
            echo(_fmt_status(status))

    rows = []
    for L in cfg["L"]:
        for p in cfg["p"]:
            records = [
                load_run_record(pair_dir(out_dir, L, p) / f"sample{k:04d}")
                for k in range(cfg["n_disorder"])
            ]
            agg_seed = sample_seeds(cfg["seed"], L, p, 10**6)[0] % (2**32)
            rows.extend(ana.aggregate_records(records, seed=agg_seed))
    rows.sort(key=lambda r: (r["p"], r["L"], r["T"], r["observable"]))
    ana.write_observable_table(out_dir / "observables.csv", rows)

    n_bad = sum(1 for s in statuses if not s["equilibrated"])
    results = {
        "schema": 1,
        "n_samples": len(statuses),
        "n_not_equilibrated": n_bad,
        "samples": sorted(statuses, key=lambda s: (s["L"], s["p"], s["k"])),
    }
    with open(out_dir / "results.json", "w") as fh:
        json.dump(results, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return results


def _fmt_status(s: dict) -> str:
    tag = "resume-skip" if s["skipped"] else ("ok" if s["equilibrated"] else "NOT-EQUILIBRATED")
    return f"  L={s['L']} p={s['p']:.4f} sample={s['k']}: {tag}"


def _jsonable(obj):
    return json.loads(json.dumps(obj))


# --- analysis ---------------------------------------------------------------------


def _manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise ConfigError(f"{run_dir} is not a campaign directory (no manifest.json)")
    with open(path) as fh:
        return json.load(fh)["config"]


def analyze_campaign(run_dir, method: str = "all", scan: str = "temperature",
                     at_t: float | None = None) -> dict:
    """Critical-point estimates from a campaign's observable tables."""
    run_dir = Path(run_dir)
    cfg = _manifest(run_dir)
    table_path = run_dir / "observables.csv"
    if not table_path.exists():
        raise ConfigError(f"{run_dir} has no observables.csv (campaign incomplete?)")
    rows = ana.read_observable_table(table_path)
    kind = cfg["model"]
    sizes = sorted(cfg["L"])
    ps = sorted(cfg["p"])
    estimates: list = []
    notes: list[str] = []

    if method in ("all", "heat"):
        for p in ps:
            peaks = []
            for L in sizes:
                t, c, e = ana.table_curve(rows, "specific_heat", p, L)
                if len(t) >= 3:
                    tp, terr = ana.locate_peak(t, c, e, seed=1)
                    peaks.append((L, tp, max(terr, 1e-6)))
            if len(peaks) >= 3:
                estimates.append(ana.heat_peak_fss(peaks, p=p))
            else:
                notes.append(f"heat: p={p}: only {len(peaks)} sizes with curves (need 3)")

    if method in ("all", "xi"):
        for p in ps:
            curves = {}
            for L in sizes:
                t, v, e = ana.table_curve(rows, "xi_over_L", p, L)
                if len(t) >= 4:
                    curves[L] = (t, v, e)
            if len(curves) >= 2:
                estimates.append(ana.xi_crossing(curves, p=p))
            else:
                notes.append(f"xi: p={p}: {len(curves)} usable curves (need 2)")

    fixed_t_scan = None
    if method in ("all", "wilson"):
        if scan == "temperature":
            for p in ps:
                est = _wilson_temperature_scan(rows, p, sizes, notes)
                if est is not None:
                    estimates.append(est)
        elif scan == "disorder":
            if at_t is None:
                raise ConfigError("disorder scan needs --at-t")
            fixed_t_scan = _wilson_disorder_scan(rows, ps, sizes, at_t, notes)
        else:
            raise ConfigError(f"unknown scan {scan!r}")

    doc = {
        "schema": 1,
        "kind": kind,
        "method": method,
        "estimates": [
            e.to_json_dict()
            if isinstance(e, ana.CriticalPointEstimate)
            else {"p": e.p, "method": e.method, "no_transition": True, "reason": e.reason}
            for e in estimates
        ],
        "notes": notes,
    }
    if fixed_t_scan is not None:
        doc["fixed_t_scan"] = fixed_t_scan
    if estimates:
        diagram = ana.assemble_phase_diagram(estimates, kind=kind)
        doc["phase_diagram"] = diagram.to_json_dict()
    elif method != "all" or fixed_t_scan is None:
        if not estimates and fixed_t_scan is None:
            raise RuntimeError("analysis produced no estimates: " + "; ".join(notes))
    return doc


def _wilson_temperature_scan(rows, p, sizes, notes):
    L = max(sizes)
    temps = sorted({r["T"] for r in rows if r["L"] == L and math.isclose(r["p"], p, abs_tol=1e-12)})
    coefs = []
    for t in temps:
        pts = ana.wilson_fit_points(rows, p, L, t)
        if len(pts) >= 4:
            fit = ana.wilson_fit(pts)
            coefs.append((t, fit.a, fit.a_err))
    if len(coefs) < 2:
        notes.append(f"wilson: p={p}: {len(coefs)} usable fits (need 2)")
        return None
    ts = np.array([c[0] for c in coefs])
    a = np.array([c[1] for c in coefs])
    a_err = np.array([c[2] for c in coefs])
    loc = ana.sign_change_location(ts, a, a_err)
    if loc is None:
        return ana.NoTransition(
            p=p, method="wilson_fit", reason="fit coefficient a(T) does not change sign",
            diagnostics={"coefficients": [list(c) for c in coefs]},
        )
    t0, err = loc
    return ana.CriticalPointEstimate(
        p=p, t_c=t0, error=err, method="wilson_fit",
        diagnostics={"L": L, "coefficients": [list(c) for c in coefs]},
    )


def _wilson_disorder_scan(rows, ps, sizes, at_t, notes):
    L = max(sizes)
    coefs = []
    for p in ps:
        temps = sorted(
            {r["T"] for r in rows if r["L"] == L and math.isclose(r["p"], p, abs_tol=1e-12)}
        )
        if not temps:
            continue
        t = min(temps, key=lambda x: abs(x - at_t))
        pts = ana.wilson_fit_points(rows, p, L, t)
        if len(pts) >= 4:
            fit = ana.wilson_fit(pts)
            coefs.append((p, fit.a, fit.a_err, t))
        else:
            notes.append(f"wilson scan: p={p}: only {len(pts)} loggable loop sizes")
    if len(coefs) < 2:
        raise RuntimeError("disorder scan needs fits at >= 2 disorder strengths")
    ps_arr = np.array([c[0] for c in coefs])
    a = np.array([c[1] for c in coefs])
    a_err = np.array([c[2] for c in coefs])
    loc = ana.sign_change_location(ps_arr, a, a_err)
    scan = {
        "T": coefs[0][3],
        "L": L,
        "coefficients": [list(c) for c in coefs],
    }
    if loc is None:
        scan["p_c"] = None
    else:
        scan["p_c"], scan["p_c_err"] = loc
    return scan


# --- report -----------------------------------------------------------------------


def write_report(run_dir, out=None, figures: bool = True, echo=print) -> Path:
    """Analysis plus delimited tables, a text summary, and (when the figure
    package is installed) rendered figures alongside."""
    run_dir = Path(run_dir)
    report_dir = Path(out) if out else run_dir / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    doc = analyze_campaign(run_dir, method="all")
    with open(report_dir / "phase.json", "w") as fh:
        json.dump(doc.get("phase_diagram", {}), fh, sort_keys=True, indent=1)
        fh.write("\n")
    with open(report_dir / "estimates.json", "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    shutil.copyfile(run_dir / "observables.csv", report_dir / "observables.csv")

    lines = [f"campaign: {run_dir}", f"model: {doc['kind']}", ""]
    for est in doc["estimates"]:
        if est.get("no_transition"):
            lines.append(f"p={est['p']:.4f}: no transition ({est['reason']})")
        else:
            lines.append(
                f"p={est['p']:.4f}: T_c = {est['Tc']:.4f} +- {est['err']:.4f} [{est['method']}]"
            )
    pd = doc.get("phase_diagram") or {}
    if pd.get("p_c_bracket"):
        lo, hi = pd["p_c_bracket"]
        lines.append(f"p_c bracket: ({lo}, {hi}), midpoint {pd['p_c_mid']:.4f}")
    for note in doc["notes"]:
        lines.append(f"note: {note}")
    (report_dir / "summary.txt").write_text("\n".join(lines) + "\n")

    if figures:
        exe = shutil.which("rcim-figures")
        if exe is None:
            echo("rcim-figures not installed; skipping figure rendering")
        else:
            _render_figures(exe, run_dir, report_dir, echo)
    return report_dir


def _render_figures(exe, run_dir, report_dir, echo) -> None:
    cfg = _manifest(run_dir)
    obs = str(report_dir / "observables.csv")
    calls = [["phase", "--input", str(report_dir / "phase.json"),
              "--out", str(report_dir / "phase.svg")]]
    rows = ana.read_observable_table(report_dir / "observables.csv")
    sizes = sorted(cfg["L"])
    for p in sorted(cfg["p"]):
        tag = f"p{p:.4f}"
        if any(r["observable"] == "xi_over_L" and math.isclose(r["p"], p) for r in rows):
            calls.append(["crossings", "--input", obs, "--p", str(p),
                          "--estimate", str(report_dir / "phase.json"),
                          "--out", str(report_dir / f"crossings_{tag}.svg")])
        if any(r["observable"].startswith("wilson_l") and math.isclose(r["p"], p) for r in rows):
            calls.append(["wilson", "--input", obs, "--p", str(p), "--L", str(max(sizes)),
                          "--out", str(report_dir / f"wilson_{tag}.svg")])
    for call in calls:
        proc = subprocess.run([exe, *call], capture_output=True, text=True)
        if proc.returncode != 0:
            echo(f"figure {call[0]} failed: {proc.stderr.strip()}")
        else:
            echo(f"rendered {call[-1]}")


# --- oracle command ------------------------------------------------------------------


def run_oracle_suites(which: str = "all") -> dict:
    doc: dict = {"schema": 1}
    if which in ("all", "identity"):
        doc["identity"] = orc.identity_suite()
    if which in ("all", "lemma"):
        lem = orc.lemma_suite()
        doc["lemma"] = {
            "ok": lem["ok"],
            "n_checks": lem["n_checks"],
            "worst_upper_slack": min(r["upper_slack"] for r in lem["results"]),
            "worst_lower_slack": min(r["lower_slack"] for r in lem["results"]),
        }
    if which in ("all", "mc"):
        doc["mc"] = orc.mc_cross_check_suite()
    doc["ok"] = all(v.get("ok", True) for k, v in doc.items() if isinstance(v, dict))
    return doc


# --- entry point ----------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rcim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run a campaign")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="campaign config YAML")
    src.add_argument("--preset", help="named preset (see 'rcim presets')")
    p_run.add_argument("--out", help="output directory (default: preset/config name)")
    p_run.add_argument("--seed", type=int, help="override master seed")
    p_run.add_argument("--workers", type=int, help="override worker count")
    p_run.add_argument("--tau", type=int, help="override equilibration exponent")
    p_run.add_argument("--n-disorder", type=int, help="override disorder sample count")

    p_an = sub.add_parser("analyze", help="estimate critical points from a campaign")
    p_an.add_argument("run_dir")
    p_an.add_argument("--method", default="all", choices=["all", "heat", "xi", "wilson"])
    p_an.add_argument("--scan", default="temperature", choices=["temperature", "disorder"])
    p_an.add_argument("--at-t", type=float, help="temperature of a fixed-T disorder scan")
    p_an.add_argument("--out", help="write analysis JSON here (default: stdout)")

    p_or = sub.add_parser("oracle", help="run exact validation suites")
    p_or.add_argument("--suite", default="all", choices=["all", "identity", "lemma", "mc"])
    p_or.add_argument("--out", help="write report JSON here (default: stdout)")

    p_rep = sub.add_parser("report", help="analysis + summary + figures")
    p_rep.add_argument("run_dir")
    p_rep.add_argument("--out", help="report directory (default: <run_dir>/report)")
    p_rep.add_argument("--no-figures", action="store_true")

    p_pre = sub.add_parser("presets", help="list or dump named presets")
    p_pre.add_argument("name", nargs="?")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _dispatch(args) -> int:
    if args.cmd == "run":
        if args.preset:
            cfg = get_preset(args.preset)
            default_name = args.preset
        else:
            with open(args.config) as fh:
                cfg = yaml.safe_load(fh)
            default_name = Path(args.config).stem
        for key in ("seed", "workers", "tau"):
            if getattr(args, key) is not None:
                cfg[key] = getattr(args, key)
        if args.n_disorder is not None:
            cfg["n_disorder"] = args.n_disorder
        cfg = normalize_config(cfg)
        out_dir = resolve_out_dir(args.out, default_name)
        results = run_campaign(cfg, out_dir)
        print(f"campaign complete: {out_dir} ({results['n_samples']} samples)")
        if results["n_not_equilibrated"]:
            print(
                f"warning: {results['n_not_equilibrated']} samples failed the "
                "equilibration test (see results.json)"
            )
            return EXIT_NOT_EQUILIBRATED
        return EXIT_OK

    if args.cmd == "analyze":
        doc = analyze_campaign(args.run_dir, method=args.method, scan=args.scan, at_t=args.at_t)
        text = json.dumps(doc, sort_keys=True, indent=1)
        if args.out:
            Path(args.out).write_text(text + "\n")
            print(f"wrote {args.out}")
        else:
            print(text)
        return EXIT_OK

    if args.cmd == "oracle":
        doc = run_oracle_suites(args.suite)
        text = json.dumps(doc, sort_keys=True, indent=1, default=float)
        if args.out:
            Path(args.out).write_text(text + "\n")
            print(f"wrote {args.out}")
        else:
            print(text)
        return EXIT_OK if doc["ok"] else EXIT_RUNTIME

    if args.cmd == "report":
        report_dir = write_report(args.run_dir, out=args.out, figures=not args.no_figures)
        print(f"report written to {report_dir}")
        return EXIT_OK

    if args.cmd == "presets":
        if args.name:
            print(yaml.safe_dump(get_preset(args.name), sort_keys=True), end="")
        else:
            for name in sorted(PRESETS):
                cfg = PRESETS[name]
                print(
                    f"{name}: model={cfg['model']} L={cfg['L']} p={cfg['p']} "
                    f"tau={cfg['tau']} n_disorder={cfg['n_disorder']}"
                )
        return EXIT_OK

    raise ConfigError(f"unknown command {args.cmd!r}")  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
