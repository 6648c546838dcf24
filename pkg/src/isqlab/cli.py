"""Command-line runner: ``python -m isqlab <subcommand> [--config F] [--out D]``.

Each subcommand reads its section of an INI config (see :data:`isqlab.io.SCHEMA`),
writes CSV tables and a JSON report into the output directory, and appends a
manifest record to ``manifest.jsonl``. Failures write ``error.json`` and exit
nonzero:

    1  tolerance failure (selftest)
    2  bad config or arguments
    3  flagged horizon under --strict
    4  numerical or domain error
"""

import argparse
import json
import math
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import families, inequalities, lattice, scattering
from .errors import ConfigError, IsqlabError
from .hankel import diagonalisation_defect, dht_forward, dht_inverse, radial_grid
from .io import SCHEMA_VERSION, ResultStore, RunManifest, file_hash, load_config, now
from .sector import RadialProfile, apply_multiplier, make_sector, schrodinger, sobolev_norm

EXIT_OK, EXIT_TOL, EXIT_CONFIG, EXIT_HORIZON, EXIT_NUMERIC = 0, 1, 2, 3, 4


class StrictHorizon(IsqlabError):
    pass


def _map(fn, items, threads):
    """Order-preserving map; threads only change wall time, never the output."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _strict(ctx, flagged, where):
    if flagged and ctx["strict"]:
        raise StrictHorizon(f"{where}: schedule times {flagged} lie past the truncation horizon")


# ---------------------------------------------------------------- selftest


def cmd_selftest(cfg, store, ctx):
    c = cfg["selftest"]
    seed = cfg["run"]["seed"]
    phi = families.random_band_limited(seed)
    bump, d2 = families.shell(15.0, 1.5), families.shell_second_derivative(15.0, 1.5)

    def one(order):
        g = radial_grid(float(order), c["radius"], c["size"])
        x = g.sample(phi)
        row = {
            "order": float(order),
            "size": c["size"],
            "radius": c["radius"],
            "unitarity": g.orthogonality_defect(),
            "roundtrip": float(np.abs(dht_inverse(g, dht_forward(g, x)) - x).max() / np.abs(x).max()),
            "diagonalisation": diagonalisation_defect(g, bump, d2),
        }
        row["pass"] = (
            row["unitarity"] <= c["unitarity_tol"]
            and row["roundtrip"] <= c["roundtrip_tol"]
            and row["diagonalisation"] <= c["diagonal_tol"]
        )
        return row

    rows = _map(one, c["orders"], ctx["threads"])
    cols = ("order", "size", "radius", "unitarity", "roundtrip", "diagonalisation", "pass")
    store.write_csv("selftest.csv", cols, rows)
    ok = all(r["pass"] for r in rows)
    store.write_json("selftest.json", {"all_pass": ok, "rows": rows})
    return EXIT_OK if ok else EXIT_TOL


# --------------------------------------------------------------- propagate


def _family(sector, c, operator):
    if c["family"] == "gaussian":
        return families.gaussian(sector, c["alpha"], c["beta"], operator)
    if c["family"] == "random":
        return families.random_band_limited(c.get("seed", 0))
    if c["family"] == "shell":
        return families.shell(15.0, 1.5)
    raise ConfigError(f"unknown family {c['family']!r}")


def cmd_propagate(cfg, store, ctx):
    c = dict(cfg["propagate"], seed=cfg["run"]["seed"])
    sec = make_sector(c["n"], c["a"], c["l"])
    p = RadialProfile.from_function(sec, _family(sec, c, "adapted"), "adapted", c["radius"], c["size"])
    oracle = c["a"] == 0.0 and c["family"] == "gaussian" and c["beta"] == 0.0

    def one(t):
        q = apply_multiplier(sec, schrodinger(t), p)
        row = {"t": t, "l2": q.norm()}
        for s in c["s"]:
            row[f"norm_s{s:g}"] = sobolev_norm(q, s)
        if oracle:
            e = q.grid.sample(families.gaussian_evolved(sec, c["alpha"], t))
            row["oracle_error"] = float(np.linalg.norm(q.values - e) / np.linalg.norm(e))
        return row

    rows = _map(one, c["times"], ctx["threads"])
    cols = ("t", "l2", *[f"norm_s{s:g}" for s in c["s"]], "oracle_error")
    store.write_csv("propagate.csv", cols, rows)
    store.write_json("propagate.json", {"sector": {"n": sec.dimension, "a": sec.coupling, "l": sec.angular_momentum},
                                        "order": sec.order, "rows": rows})
    return EXIT_OK


# ----------------------------------------------------------------- scatter


def cmd_scatter(cfg, store, ctx):
    c = dict(cfg["scatter"], seed=cfg["run"]["seed"])
    sec = make_sector(c["n"], c["a"], c["l"])
    op = "free" if c["direction"] == "forward" else "adapted"
    u = RadialProfile.from_function(sec, _family(sec, c, op), op, c["radius"], c["size"])
    kw = dict(schedule=c["schedule"], on_horizon="flag")
    if c["kind"] == "schrodinger":
        rep = scattering.schrodinger_wave_limit(sec, c["s"], u, c["direction"], **kw)
    elif c["kind"] == "half_wave":
        rep = scattering.half_wave_limit(sec, c["s"], u, c["direction"], 1, **kw)
    elif c["kind"] == "wave":
        pair = scattering.WavePair(u, u * 0.0, c["s"])
        rep = scattering.wave_scatter(sec, pair, c["direction"], **kw)
    else:
        raise ConfigError(f"unknown scatter kind {c['kind']!r}")
    phases = dict(rep.phase_history)
    rows = [
        {"t": t, "residual": r,
         "phase_re": phases[t].real if t in phases else None,
         "phase_im": phases[t].imag if t in phases else None,
         "flagged": t in rep.flagged_times}
        for t, r in rep.cauchy_residuals
    ]
    store.write_csv("scatter.csv", ("t", "residual", "phase_re", "phase_im", "flagged"), rows)
    out = rep.to_dict()
    lim = rep.limit.v0 if c["kind"] == "wave" else rep.limit
    src = u
    if lim.grid is src.grid:
        out["limit_input_gap"] = float(np.linalg.norm(lim.values - src.values) / np.linalg.norm(src.values))
    store.write_json("scatter.json", out)
    _strict(ctx, rep.flagged_times, "scatter")
    return EXIT_OK


# ---------------------------------------------------------------- critical


def _critical_field(c):
    n, alpha, x0 = c["n"], c["alpha"], c["offset"]
    if c["field"] == "radial_gaussian":
        return lambda r, x: np.exp(-alpha * r * r) + 0.0 * x
    if c["field"] == "offset_gaussian":
        # |x - x0 e_n|^2 = r^2 - 2 r x0 cos(theta) + x0^2
        return lambda r, x: np.exp(-alpha * (r * r - 2.0 * r * x0 * x + x0 * x0))
    raise ConfigError(f"unknown critical field {c['field']!r}")


def critical_components(c):
    """Zonal components of the configured field, each on its critical adapted grid.

    Components below 1e-12 of the total L2 mass are dropped.
    """
    n, f = c["n"], _critical_field(c)
    comps = {}
    for l in range(c["max_l"] + 1):
        sec = scattering.critical_sector(n, l)

        def radial(r, l=l):
            return scattering.sector_decompose(n, f, r, c["max_l"])[l]

        comps[l] = RadialProfile.from_physical(sec, radial, "adapted", c["radius"], c["size"])
    total = math.sqrt(sum(p.norm() ** 2 for p in comps.values()))
    return {l: p for l, p in comps.items() if p.norm() > 1e-12 * total}


def cmd_critical(cfg, store, ctx):
    c = cfg["critical"]
    comps = critical_components(c)
    out = scattering.critical_decompose(c["n"], c["s"], comps, c["schedule"], on_horizon="flag", times=c["times"])
    radial = [{"t": t, "conjugation_residual": r} for t, r in out["radial_channel"].get("residuals", [])]
    store.write_csv("critical_radial.csv", ("t", "conjugation_residual"), radial)
    scat, reports, flagged = [], {}, []
    for l, rep in out["scattered_channel"].items():
        reports[str(l)] = rep.to_dict()
        flagged += rep.flagged_times
        scat += [{"l": l, "t": t, "residual": r, "flagged": t in rep.flagged_times} for t, r in rep.cauchy_residuals]
    store.write_csv("critical_scattered.csv", ("l", "t", "residual", "flagged"), scat)
    store.write_json("critical.json", {
        "n": c["n"],
        "components": {str(l): p.norm() for l, p in comps.items()},
        "radial_channel": radial,
        "scattered_channel": reports,
    })
    _strict(ctx, sorted(set(flagged)), "critical")
    return EXIT_OK


# ------------------------------------------------------------ inequalities


def cmd_inequalities(cfg, store, ctx):
    c = cfg["inequalities"]
    seed = cfg["run"]["seed"]
    R, N = c["radius"], c["size"]

    hardy = []
    for n in c["dimensions"]:
        for l in (0, 1, 2):
            sec = make_sector(n, 0.0, l)
            for f in families.default_family(sec, seed):
                p = RadialProfile.from_function(sec, f, "free", R, N)
                hardy.append({"n": n, "l": l, "family_id": f.family_id, "kind": "hardy",
                              "ratio": inequalities.hardy_ratio(n, p)})
                if l >= 1:
                    hardy.append({"n": n, "l": l, "family_id": f.family_id, "kind": "hardy_perp",
                                  "ratio": inequalities.hardy_perp_ratio(n, l, p)})
    store.write_csv("hardy.csv", ("n", "l", "family_id", "kind", "ratio"), hardy)

    sharp = []
    for n in c["dimensions"]:
        for span in c["spans"]:
            phi, dphi, supp = families.log_bump(span)
            sharp.append({"n": n, "span": span,
                          "ratio": inequalities.hardy_ratio_analytic(n, phi, dphi, supp),
                          "exact": families.log_bump_ratio(span, n)})
    store.write_csv("hardy_sharpness.csv", ("n", "span", "ratio", "exact"), sharp)

    sob = []
    for n in c["dimensions"]:
        for eps in (0.0, 0.05, 0.2, 0.5):
            u, du = families.aubin_talenti(n, 1.0, eps)
            sob.append({"n": n, "eps": eps, "ratio": inequalities.sobolev_trial_ratio(n, u, du)})
    store.write_csv("sobolev.csv", ("n", "eps", "ratio"), sob)

    jobs = [
        (n, a, s)
        for n in c["dimensions"]
        for a in (0.0, -0.9 * (n - 2) ** 2 / 4.0, *c["couplings"])
        for s in c["s_values"]
    ]

    def sweep(job):
        n, a, s = job
        return inequalities.norm_equivalence_sweep(
            n, a, s, family=lambda sec: families.default_family(sec, seed),
            radius=R, size=N, refine=c["refine"],
        )

    results = _map(sweep, jobs, ctx["threads"])
    rows, summary = [], []
    for (n, a, s), res in zip(jobs, results):
        rows += [dict(r, n=n) for r in res.rows]
        summary.append({"n": n, "a": a, "s": s, "min": res.extremes[0], "max": res.extremes[1],
                        "delta_min": res.refinement_deltas[0] if res.refinement_deltas else None,
                        "delta_max": res.refinement_deltas[1] if res.refinement_deltas else None})
    store.write_csv("norm_sweep.csv", ("n", *inequalities.SweepResult.COLUMNS), rows)
    store.write_csv("norm_sweep_summary.csv", ("n", "a", "s", "min", "max", "delta_min", "delta_max"), summary)

    kato = []
    for T in c["kato_times"]:
        sec = make_sector(3, 1.0, 0)
        p = RadialProfile.from_function(sec, families.gaussian(sec, 0.1, 0, "adapted"), "adapted", 1200.0, 1600)
        kato.append({"T": T, "ratio": inequalities.kato_doubling_ratio(p, T)})
    store.write_csv("kato.csv", ("T", "ratio"), kato)

    store.write_json("inequalities.json", {
        "hardy_max": max(r["ratio"] for r in hardy if r["kind"] == "hardy"),
        "hardy_perp_max": max((r["ratio"] for r in hardy if r["kind"] == "hardy_perp"), default=None),
        "sharpness_max": max((r["ratio"] for r in sharp), default=None),
        "sobolev": sob,
        "sweeps": summary,
        "kato": kato,
    })
    return EXIT_OK


# --------------------------------------------------------------- criterion


def cmd_criterion(cfg, store, ctx):
    c = cfg["criterion"]
    params = {"c": c["strength"]} if c["potential"] == "aubin_talenti" else {}
    model = lattice.build_model(c["n"], c["l"], c["size"], c["radius"], c["potential"], **params)
    wave = lattice.build_model(c["n"], c["l"], c["wave_size"], c["wave_radius"], c["potential"], **params)
    u = lattice.wave_packet(wave, *c["packet"])
    schedules = {"identity": c["identity_schedule"], "sqrt": c["sqrt_schedule"]}
    rep = lattice.criterion_report(model, u, wave_model=wave, schedules=schedules)
    d = rep.to_dict()
    rows = []
    for name, run in d["wave_limit"].items():
        for t, r in run["cauchy_residuals"]:
            rows.append({"f": name, "t": t, "residual": r, "flagged": t > run["horizon"]})
    store.write_csv("criterion_wave.csv", ("f", "t", "residual", "flagged"), rows)
    sv = [{"index": k, "singular_value": v} for k, v in enumerate(rep.h2_singular_values[:64])]
    store.write_csv("criterion_h2.csv", ("index", "singular_value"), sv)
    store.write_json("criterion.json", d)
    _strict(ctx, [r["t"] for r in rows if r["flagged"]], "criterion")
    return EXIT_OK


# ------------------------------------------------------------------ report


def cmd_report(cfg, store, ctx):
    """Collect the JSON reports under ``inputs`` (default: the output directory) into one table."""
    dirs = [Path(p) for p in cfg["report"]["inputs"]] or [store.root]
    rows = []
    for d in dirs:
        for path in sorted(d.glob("*.json")):
            if path.name in ("summary.json", "error.json"):
                continue
            body = json.loads(path.read_text())
            for key in ("all_pass", "hardy_max", "hardy_perp_max", "sharpness_max", "isometry_defect",
                        "invariance_residual", "min_eigenvalue"):
                if key in body and not isinstance(body[key], (dict, list)):
                    rows.append({"source": str(path), "quantity": key, "value": body[key]})
            if "cauchy_residuals" in body and body["cauchy_residuals"]:
                rows.append({"source": str(path), "quantity": "final_residual", "value": body["cauchy_residuals"][-1][1]})
    store.write_csv("summary.csv", ("source", "quantity", "value"), rows)
    store.write_json("summary.json", {"rows": rows})
    return EXIT_OK


COMMANDS = {
    "selftest": cmd_selftest,
    "propagate": cmd_propagate,
    "scatter": cmd_scatter,
    "critical": cmd_critical,
    "inequalities": cmd_inequalities,
    "criterion": cmd_criterion,
    "report": cmd_report,
}


def build_parser():
    p = argparse.ArgumentParser(prog="isqlab", description="Inverse-square scattering laboratory")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="INI file; missing keys take their defaults")
    p.add_argument("--out", default="runs", help="output directory (default: runs)")
    p.add_argument("--seed", type=int, help="overrides [run] seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent sub-runs")
    p.add_argument("--strict", action="store_true", help="fail when any schedule time passes the horizon")
    return p


def _error_record(out, command, exc, code):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "exit_code": code,
        "error_type": type(exc).__name__,
        "message": str(exc),
    }
    (out / "error.json").write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n")
    print(f"[isqlab] {type(exc).__name__}: {exc}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    manifest = None
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        cfg = load_config(args.config, args.command)
        if args.seed is not None:
            cfg["run"]["seed"] = args.seed
        manifest = RunManifest(
            experiment=args.command,
            params=cfg,
            input_hashes={args.config: file_hash(args.config)} if args.config else {},
            started=now(),
        )
        store = ResultStore(args.out, manifest)
        ctx = {"threads": args.threads, "strict": args.strict}
        code = COMMANDS[args.command](cfg, store, ctx)
        manifest.status = "ok" if code == EXIT_OK else "tolerance-failure"
    except ConfigError as exc:
        code = EXIT_CONFIG
        _error_record(args.out, args.command, exc, code)
    except StrictHorizon as exc:
        code = EXIT_HORIZON
        _error_record(args.out, args.command, exc, code)
        manifest.status = "horizon"
        manifest.outputs.append("error.json")
    except (IsqlabError, ValueError, ArithmeticError) as exc:
        code = EXIT_NUMERIC
        _error_record(args.out, args.command, exc, code)
        traceback.print_exc()
        if manifest is not None:
            manifest.status = "error"
            manifest.outputs.append("error.json")
    if manifest is not None:
        manifest.finished = now()
        ResultStore(args.out, manifest).append_manifest()
    if code == EXIT_OK:
        print(f"[isqlab] {args.command} ok -> {args.out} (manifest {manifest.manifest_id})")
    return code


if __name__ == "__main__":
    sys.exit(main())
