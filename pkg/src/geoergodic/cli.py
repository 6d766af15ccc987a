"""Command-line front end: ``geoergodic <command> --config run.json``.

Exit status is 0 when every audit passes, 1 on an audit failure, 2 when an
estimator is inconclusive and 3 for configuration errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import convexity as cx
from . import ergodic as erg
from . import geometry as geo
from . import ray as ry
from .errors import GeoErgodicError, InconclusiveError

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3
COMMANDS = ("triangle-demo", "modulus", "convexity-check", "drift", "ray")

SECTIONS = {
    "triangle": {"n_min", "n_max"},
    "modulus": {"center", "radii", "eps", "n_samples", "oracle", "tolerance", "floor"},
    "check": {"notions"},
    "drift": {"n_grid", "n_paths", "expect_A", "tolerance", "expect_status"},
    "ray": {"horizon", "depth", "n_grid", "n_paths", "path_index", "R_points", "modulus", "s",
            "tail"},
}
TOP_LEVEL = {"seed", "space", "family", "system", "basepoint"} | set(SECTIONS)
NOTION_KEYS = {
    "busemann": {"n_samples", "scale", "expect"},
    "p_uniform": {"n_samples", "scale", "expect", "p", "k"},
    "km": {"n_samples", "scale", "expect", "p", "k"},
    "property_c": {"n_samples", "expect", "psi", "point"},
}


class ConfigError(Exception):
    pass


# -- config parsing -----------------------------------------------------------------

def _keys(section: dict, allowed: set, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be an object")
    extra = sorted(set(section) - allowed)
    if extra:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(extra)}")


def load_config(path, seed=None) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    _keys(config, TOP_LEVEL, "config")
    for name, allowed in SECTIONS.items():
        if name in config:
            _keys(config[name], allowed, name)
    for i, notion in enumerate(config.get("check", {}).get("notions", [])):
        kind = notion.get("notion") if isinstance(notion, dict) else None
        if kind not in NOTION_KEYS:
            raise ConfigError(f"check.notions[{i}]: unknown notion {kind!r}")
        _keys(notion, NOTION_KEYS[kind] | {"notion"}, f"check.notions[{i}]")
    if seed is not None:
        config["seed"] = int(seed)
    config.setdefault("seed", 0)
    return config


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def build_space(config: dict):
    if "space" not in config:
        raise ConfigError("config has no space")
    return geo.space_from_dict(config["space"])


def build_point(space, desc):
    if desc is None or desc == "origin":
        return geo.origin(space)
    if isinstance(desc, dict):
        _keys(desc, {"triangle", "vertex", "coords"}, "point")
        if "vertex" in desc:
            return geo.chain_vertex(space, int(desc["triangle"]), desc["vertex"])
        return geo.chain_point(space, int(desc["triangle"]), desc["coords"])
    coords = [float(v) for v in desc]
    if space.kind == geo.HYPERBOLIC2 and len(coords) == 2:
        return geo.hyperbolic_point(*coords)
    if space.kind == geo.SPHERICAL_TRIANGLE:
        coords = list(np.asarray(coords) / np.linalg.norm(coords))
    return geo.Point(space, coords)


def build_generator(space, desc: dict):
    kind = desc.get("type")
    shapes = {"translation": {"vector"}, "rotation": {"angle", "center"},
              "boost": {"length", "direction"}, "hyperbolic_rotation": {"angle"},
              "contraction": {"target", "factor"}}
    if kind not in shapes:
        raise ConfigError(f"unknown generator type {kind!r}")
    _keys(desc, shapes[kind] | {"type"}, f"generator {kind}")
    if kind == "translation":
        return erg.translation(desc["vector"])
    if kind == "rotation":
        return erg.rotation(float(desc["angle"]), desc.get("center", (0.0, 0.0)))
    if kind == "boost":
        return erg.boost(float(desc["length"]), float(desc.get("direction", 0.0)))
    if kind == "hyperbolic_rotation":
        return erg.hyperbolic_rotation(float(desc["angle"]))
    return erg.GeodesicContraction(build_point(space, desc["target"]), float(desc["factor"]))


def build_family(config: dict, space):
    fam = config.get("family")
    if fam is None:
        raise ConfigError("config has no family")
    _keys(fam, {"generators"}, "family")
    return erg.MapFamily(space, [build_generator(space, g) for g in fam["generators"]])


def build_system(config: dict):
    sysc = config.get("system")
    if sysc is None:
        raise ConfigError("config has no system")
    _keys(sysc, {"probabilities"}, "system")
    return erg.SymbolicSystem(tuple(sysc["probabilities"]), int(config["seed"]))


# -- reports ------------------------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.audits = []
        self.results = {}
        self.tables = {}
        self.inconclusive = []

    def audit(self, name: str, passed: bool, **detail) -> None:
        self.audits.append({"name": name, "passed": bool(passed), **detail})

    def table(self, name: str, header, rows) -> None:
        self.tables[name] = (list(header), [list(r) for r in rows])

    @property
    def status(self) -> str:
        if not all(a["passed"] for a in self.audits):
            return "fail"
        if self.inconclusive:
            return "inconclusive"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[self.status]

    def summary(self) -> dict:
        return _clean({"command": self.command, "seed": self.config["seed"],
                       "config_hash": config_hash(self.config), "status": self.status,
                       "inconclusive": self.inconclusive, "audits": self.audits,
                       "results": self.results, "config": self.config})

    def write(self, out: Path, fmt: str) -> list:
        out.mkdir(parents=True, exist_ok=True)
        stem = self.command.replace("-", "_")
        written = []
        if fmt in ("summary", "both"):
            path = out / f"{stem}_report.json"
            path.write_text(json.dumps(self.summary(), sort_keys=True, indent=2) + "\n")
            written.append(path)
        if fmt in ("csv", "both"):
            import csv
            for name, (header, rows) in sorted(self.tables.items()):
                path = out / f"{stem}_{name}.csv"
                with open(path, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(header)
                    for row in rows:
                        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                                    for v in row])
                written.append(path)
        return written


# -- commands ---------------------------------------------------------------------------------

def run_triangle(config: dict, rep: Report) -> None:
    sec = config.get("triangle", {})
    lo, hi = int(sec.get("n_min", 2)), int(sec.get("n_max", 10))
    if not 2 <= lo <= hi:
        raise ConfigError("need 2 <= n_min <= n_max")
    rows, worst = [], 0.0
    for n in range(lo, hi + 1):
        t = geo.triangle_data(n)
        res = max(t.residuals().values())
        worst = max(worst, res)
        rows.append([n, t.d_bc, t.d_ab, t.d_ac, t.d_a_mid, math.acos(math.sqrt(3) / (2 * n)),
                     math.acos(1 / n), res])
    rep.table("triangles", ["n", "d_bc", "d_ab", "d_ac", "d_a_mid", "closed_ab",
                            "closed_a_mid", "max_residual"], rows)
    rep.results = {"n_min": lo, "n_max": hi, "worst_residual": worst}
    rep.audit("closed_forms", worst <= geo.CLOSED_FORM_TOL, worst=worst, tolerance=geo.CLOSED_FORM_TOL)


def run_modulus(config: dict, rep: Report) -> None:
    space = build_space(config)
    sec = config.get("modulus", {})
    center = build_point(space, sec.get("center"))
    n = int(sec.get("n_samples", 10_000))
    oracle = sec.get("oracle", "none")
    tol = float(sec.get("tolerance", 0.02))
    floor = sec.get("floor")
    rows = []
    for eps in sec.get("eps", [0.5]):
        for r in sec.get("radii", [1.0]):
            est = cx.modulus_estimate(space, center, float(r), float(eps), n, int(config["seed"]))
            exact = {"cat0": lambda: cx.cat0_modulus(eps),
                     "hyperbolic": lambda: cx.hyperbolic_modulus(r, eps)}.get(oracle, lambda: math.nan)()
            rows.append([r, eps, est.value, est.accepted, est.samples, exact])
            tag = f"r={r:g},eps={eps:g}"
            if est.status == cx.INCONCLUSIVE:
                rep.inconclusive.append(tag)
                continue
            if oracle != "none":
                rep.audit(f"oracle[{tag}]", abs(est.value - exact) <= tol, value=est.value,
                          oracle=exact, tolerance=tol)
            if floor == "half_eps":
                rep.audit(f"floor[{tag}]", est.value >= eps / 2 - tol, value=est.value,
                          floor=eps / 2 - tol)
    rep.table("modulus", ["r", "eps", "value", "accepted", "samples", "oracle"], rows)
    rep.results = {"center": center.to_record(), "n_samples": n, "estimates": len(rows)}


def _psi(space, name):
    if name == "cat0":
        return lambda y, r, e: cx.cat0_modulus(e)
    if name == "hyperbolic":
        return lambda y, r, e: cx.hyperbolic_modulus(r, e)
    if isinstance(name, (int, float)):
        return lambda y, r, e: float(name)
    raise ConfigError(f"unknown psi {name!r}")


def run_check(config: dict, rep: Report) -> None:
    space = build_space(config)
    seed = int(config["seed"])
    reports = []
    for desc in config.get("check", {}).get("notions", [{"notion": "busemann"}]):
        kind = desc["notion"]
        n = int(desc.get("n_samples", 10_000))
        scale = desc.get("scale")
        if kind == "busemann":
            res = cx.busemann_defect(space, n, seed, scale=scale)
        elif kind == "p_uniform":
            res = cx.p_uniform_check(space, float(desc.get("p", 2)), float(desc["k"]), n, seed, scale=scale)
        elif kind == "km":
            g = cx.km_function(float(desc["k"]), float(desc.get("p", 2)))
            res = cx.km_convexity_check(space, g, n, seed, scale=scale)
        else:
            y = build_point(space, desc.get("point"))
            res = cx.property_c_check(space, y, _psi(space, desc.get("psi", "cat0")), n, seed)
        expect = desc.get("expect", cx.OK)
        if res.status == cx.INCONCLUSIVE:
            rep.inconclusive.append(kind)
        else:
            rep.audit(f"{kind}", res.status == expect, status=res.status, expected=expect,
                      worst_defect=res.worst_defect)
        reports.append(res.to_record())
    rep.table("checks", ["notion", "trials", "worst_defect", "status"],
              [[r["notion"], r["trials"], r["worst_defect"], r["status"]] for r in reports])
    rep.results = {"checks": reports}


def run_drift(config: dict, rep: Report) -> None:
    space = build_space(config)
    fam = build_family(config, space)
    system = build_system(config)
    y = build_point(space, config.get("basepoint"))
    sec = config.get("drift", {})
    est = erg.drift_estimate(fam, system, y, sec.get("n_grid", [10, 100, 1000]),
                             int(sec.get("n_paths", 100)))
    rep.results = est.to_record()
    rep.table("drift", ["n", "mean", "se"], est.per_n)
    if "expect_A" in sec:
        tol = float(sec.get("tolerance", 3 * est.A_se))
        rep.audit("drift_value", abs(est.A - float(sec["expect_A"])) <= tol, A=est.A,
                  expected=sec["expect_A"], tolerance=tol)
    if "expect_status" in sec:
        rep.audit("drift_status", est.status == sec["expect_status"], status=est.status)


def run_ray(config: dict, rep: Report) -> None:
    space = build_space(config)
    fam = build_family(config, space)
    system = build_system(config)
    y = build_point(space, config.get("basepoint"))
    sec = config.get("ray", {})
    horizon = int(sec.get("horizon", 5000))
    depth = int(sec.get("depth", ry.DEFAULT_DEPTH))
    est = erg.drift_estimate(fam, system, y, sec.get("n_grid", [horizon // 4, horizon // 2, horizon]),
                             int(sec.get("n_paths", 200)))
    rep.results["drift"] = est.to_record()
    if est.status != "ok":
        rep.inconclusive.append("drift is near zero; no ray to extract")
        return
    symbols = erg.sample_path(system, horizon, int(sec.get("path_index", 0)))
    traj = erg.cocycle_orbit(fam, symbols, y, horizon)
    probe = {"modulus": sec.get("modulus", "hyperbolic")}
    if "s" in sec:
        probe["s"] = float(sec["s"])
    pairs = [ry.alpha_from_condition_one(space, y, i, probe) for i in range(1, depth + 2)]
    sched = ry.epsilon_schedule(est.A, [a for a, _ in pairs], [s for _, s in pairs], traj, est.A_se)
    rep.audit("schedule", all(e.inequality_holds(sched.A) for e in sched.entries))
    sel = ry.select_sequences(traj, sched, horizon, depth=depth, tail=float(sec.get("tail", 0.5)))
    rep.results["selection"] = sel.to_record()
    rep.audit("selection_flags", all(sel.level(i).certified for i in range(1, sel.depth + 1)),
              depth=sel.depth)
    if sel.status != "complete" or sel.depth < 2:
        rep.inconclusive.append(f"selection {sel.status} at depth {sel.depth}")
        return
    worst = math.inf
    for j in range(1, sel.depth + 1):
        _, bounds, actual = ry.claim1_table(sel, traj, j)
        worst = min(worst, float(np.min(bounds - actual)))
    rep.audit("claim1", worst >= -ry.AUDIT_TOL, min_slack=worst)
    top = float(traj.distances[sel.level(sel.depth).n])
    grid = np.linspace(0.0, top, int(sec.get("R_points", 25)) + 1)[1:]
    ray = ry.ray_extract(sel, traj, grid)
    rep.audit("successive_differences", all(d["passed"] for d in ray.differences))
    rep.audit("busemann_scaling", all(b["passed"] for b in ray.busemann))
    entries, skipped = ry.residual_audit(sel, ray, traj)
    rep.audit("claim2", all(e.claim2 <= e.claim2_bound + ry.AUDIT_TOL for e in entries),
              entries=len(entries))
    rep.audit("final_bound", all(e.residual <= e.final_bound + ry.AUDIT_TOL for e in entries),
              skipped=len(skipped))
    if sel.depth >= 3:
        shallow = ry.ray_extract(sel, traj, grid, depth=sel.depth - 1)
        probe_rows = ry.uniqueness_probe(ray, shallow, traj)
        rep.audit("uniqueness", all(p["passed"] for p in probe_rows), compared=len(probe_rows))
    rep.results["ray"] = ray.to_record()
    rep.results["residual_max_ratio"] = max((e.residual / e.final_bound for e in entries), default=None)
    rep.table("residuals", ["k", "i", "Ak", "residual", "final_bound", "claim2", "claim2_bound", "passed"],
              [[e.k, e.i, e.Ak, e.residual, e.final_bound, e.claim2, e.claim2_bound, int(e.passed)]
               for e in entries])
    rep.table("ray", ["R", "I", "level", "error_bound"] + [f"x{i}" for i in range(space.width)],
              [[s.R, s.I, s.level, s.error_bound] + list(s.point.coords) for s in ray.samples
               if s.point is not None])
    rep.table("trajectory", ["n", "D_n"], [[n, float(d)] for n, d in enumerate(traj.distances)])


RUNNERS = {"triangle-demo": run_triangle, "modulus": run_modulus, "convexity-check": run_check,
           "drift": run_drift, "ray": run_ray}


def run(command: str, config: dict) -> Report:
    rep = Report(command, config)
    try:
        RUNNERS[command](config, rep)
    except InconclusiveError as exc:
        rep.inconclusive.append(str(exc))
    return rep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="geoergodic", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--format", choices=("summary", "csv", "both"), default="summary")
    args = parser.parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config, args.seed)
        else:
            config = {"seed": 0 if args.seed is None else args.seed}
        rep = run(args.command, config)
    except (ConfigError, GeoErgodicError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in rep.write(Path(args.out), args.format):
        print(f"wrote {path}")
    failed = [a["name"] for a in rep.audits if not a["passed"]]
    print(f"{args.command}: {rep.status}" + (f" (failed: {', '.join(failed)})" if failed else ""))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
