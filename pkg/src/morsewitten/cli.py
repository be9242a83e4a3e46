"""Command line front end: run scenarios, write reports, export flow lines."""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .complex import all_connections, build_morse_complex, verify_chain_complex
from .config import DEFAULT, Config
from .critical import euler_characteristic, find_critical_points
from .errors import MorseError, UnknownScenario
from .flow import check_morse_smale
from .homology import homology_of_complex
from .scenarios import SCENARIOS, get_scenario
from .simplicial import read_mesh, simplicial_homology, sublevel_filtration_check


@dataclass
class Report:
    """Outcome of one scenario run.

    ``payload`` is deterministic for a fixed configuration; wall-clock
    timings live in ``timings`` and are written to a separate file.
    """

    scenario: str
    payload: Dict
    timings: Dict[str, float] = field(default_factory=dict)
    connections: List = field(default_factory=list)

    @property
    def match(self) -> bool:
        return bool(self.payload.get("match"))

    @property
    def ok(self) -> bool:
        p = self.payload
        return self.match and p.get("chain_complex", True) and p.get("morse_smale", {}).get("clean", True)

    def to_json(self) -> str:
        return json.dumps(self.payload, indent=2, sort_keys=True) + "\n"


class _Clock:
    def __init__(self):
        self.timings = {}

    def __call__(self, key):
        clock = self

        class _T:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                clock.timings[key] = round(time.perf_counter() - self.t, 6)

        return _T()


def run_scenario(name: str, cfg: Optional[Config] = None) -> Report:
    sc = get_scenario(name)
    cfg = sc.config(cfg or DEFAULT)
    clock = _Clock()
    payload = {"scenario": sc.name, "description": sc.description}

    with clock("simplicial"):
        mesh = sc.mesh(with_values=False)
        ref = simplicial_homology(mesh)
    payload["simplicial_homology"] = ref.as_dict()
    payload["mesh"] = {"asset": sc.mesh_asset, "f_vector": list(mesh.f_vector),
                       "euler_characteristic": mesh.euler_characteristic}
    payload["expected_homology"] = sc.expected.as_dict()

    if sc.mesh_only:
        payload["match"] = ref == sc.expected
        return Report(sc.name, payload, clock.timings)

    surface, fn = sc.make_surface(), sc.make_field()
    payload["config"] = {k: getattr(cfg, k) for k in ("seeds", "crit_tol", "step_tol",
                                                       "capture_radius", "near_radius")}
    with clock("critical_points"):
        cps = find_critical_points(surface, fn, cfg)
    payload["critical_points"] = [c.as_dict() for c in cps]
    payload["euler_characteristic"] = {"critical": euler_characteristic(cps),
                                       "mesh": mesh.euler_characteristic}

    with clock("morse_smale"):
        ms = check_morse_smale(surface, fn, cps, cfg)
    payload["morse_smale"] = ms.as_dict()

    errors = []
    with clock("connections"):
        try:
            conns = all_connections(surface, fn, cps, cfg)
        except MorseError as exc:
            conns = {}
            errors.append(f"{type(exc).__name__}: {exc}")
    flat = [c for key in sorted(conns) for c in conns[key]]
    payload["connections"] = [
        {"source": s, "target": t, "count": len(cs), "signs": [c.sign for c in cs],
         "n": int(sum(c.sign for c in cs))}
        for (s, t), cs in sorted(conns.items())]

    cx = build_morse_complex(cps, flat)
    ok, failing = verify_chain_complex(cx)
    payload["complex"] = cx.as_dict()
    payload["chain_complex"] = ok
    payload["failing_degree"] = failing
    with clock("homology"):
        morse = homology_of_complex(cx.ranks, cx.boundaries) if ok else None
    payload["morse_homology"] = morse.as_dict() if morse else None
    payload["match"] = bool(morse is not None and morse == ref and not errors)
    payload["errors"] = errors
    return Report(sc.name, payload, clock.timings, flat)


# -- output -------------------------------------------------------------------------

def _table(rows, header):
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*map(str, r)) for r in rows]
    return "\n".join(lines)


def _betti(prof):
    if prof is None:
        return "-"
    return "(" + ", ".join(str(g["betti"]) + ("+T" + "x".join(map(str, g["torsion"])) if g["torsion"] else "")
                           for g in prof) + ")"


def summary(report: Report) -> str:
    p = report.payload
    out = [f"scenario: {report.scenario}  ({p['description']})"]
    if "critical_points" in p:
        rows = [(c["id"], c["index"], f"{c['value']:+.6f}",
                 "(" + ", ".join(f"{v:+.5f}" for v in c["position"]) + ")")
                for c in p["critical_points"]]
        out += ["", _table(rows, ("id", "index", "value", "position"))]
        rows = [(f"{c['source']} -> {c['target']}", c["count"], c["n"]) for c in p["connections"]]
        if rows:
            out += ["", _table(rows, ("pair", "count", "n(p,q)"))]
    rows = [("simplicial homology", _betti(p["simplicial_homology"]))]
    if "morse_homology" in p:
        rows.insert(0, ("morse homology", _betti(p["morse_homology"])))
        rows.append(("d^2 = 0", p["chain_complex"]))
        rows.append(("morse-smale clean", p["morse_smale"]["clean"]))
    rows.append(("match", p["match"]))
    out += ["", _table(rows, ("check", "result"))]
    for s, t, d in ((v["source"], v["target"], v["detail"]) for v in p.get("morse_smale", {}).get("violations", [])):
        out.append(f"violation: {s} -> {t}: {d}")
    for e in p.get("errors", []):
        out.append(f"error: {e}")
    return "\n".join(out)


def export_flowlines(report: Report, directory, fmt="csv", plane="xz"):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        for k, c in enumerate(report.connections):
            path = directory / f"{report.scenario}_{c.source}_{c.target}_{k}.csv"
            traj = c.representative
            rows = ["time,x,y,z"] + [f"{t:.10g},{x:.10g},{y:.10g},{z:.10g}"
                                     for t, (x, y, z) in traj.samples()]
            path.write_text("\n".join(rows) + "\n")
            written.append(path)
    elif fmt == "svg":
        path = directory / f"{report.scenario}.svg"
        path.write_text(_svg(report, plane))
        written.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written


def _svg(report: Report, plane="xz", size=480):
    axes = ["xyz".index(ch) for ch in plane]
    lines = [c.representative.points[:, axes] for c in report.connections]
    cps = np.array([c["position"] for c in report.payload.get("critical_points", [])])
    pts = np.concatenate(lines + ([cps[:, axes]] if len(cps) else [])) if lines or len(cps) else np.zeros((1, 2))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    scale = (size - 40) / max(float(np.max(hi - lo)), 1e-9)

    def xy(p):
        return 20 + (p[0] - lo[0]) * scale, size - 20 - (p[1] - lo[1]) * scale

    body = []
    for c, pl in zip(report.connections, lines):
        color = "#1f77b4" if c.sign > 0 else "#d62728"
        d = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, pl))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{d}"/>')
    for p in cps:
        x, y = xy(p[axes])
        body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="black"/>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
            + "\n".join(body) + "\n</svg>\n")


def write_report(report: Report, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json())
    timings = path.with_name(path.stem + ".timings.json")
    timings.write_text(json.dumps(report.timings, indent=2, sort_keys=True) + "\n")
    return path, timings


# -- argparse -----------------------------------------------------------------------

def _cmd_list(args):
    rows = [(s.name, "mesh" if s.mesh_only else "morse", s.mesh_asset, s.description)
            for s in SCENARIOS.values()]
    print(_table(rows, ("name", "kind", "mesh", "description")))
    return 0


def _config_from(args) -> Config:
    changes = {}
    if args.seeds is not None:
        changes["seeds"] = args.seeds
    if args.tol_grad is not None:
        changes["crit_tol"] = args.tol_grad
    if args.jobs is not None:
        changes["jobs"] = args.jobs
    return DEFAULT.with_(**changes)


def _cmd_run(args):
    cfg = _config_from(args)
    names = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    for n in names:
        get_scenario(n)
    if len(names) > 1 and cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(run_scenario, names, [cfg.with_(jobs=1)] * len(names)))
    else:
        reports = [run_scenario(n, cfg) for n in names]
    status = 0
    for rep in reports:
        print(summary(rep))
        print()
        if args.report:
            target = Path(args.report)
            if len(reports) > 1:
                target = target / f"{rep.scenario}.json"
            write_report(rep, target)
        if args.export_flowlines:
            export_flowlines(rep, args.export_flowlines, args.format, args.plane)
        if not rep.ok:
            status = 1
    return status


def _cmd_mesh_homology(args):
    mesh = read_mesh(args.path, args.values)
    prof = simplicial_homology(mesh)
    print(f"f-vector: {mesh.f_vector}  euler characteristic: {mesh.euler_characteristic}")
    rows = [(g["degree"], g["betti"], " ".join(map(str, g["torsion"])) or "-") for g in prof.as_dict()]
    print(_table(rows, ("degree", "betti", "torsion")))
    if args.json:
        print(json.dumps(prof.as_dict(), sort_keys=True))
    return 0


def _cmd_filtration(args):
    sc = get_scenario(args.scenario)
    if sc.mesh_only:
        print(f"{sc.name} has no Morse function", file=sys.stderr)
        return 2
    cps = find_critical_points(sc.make_surface(), sc.make_field(), sc.config())
    report = sublevel_filtration_check(sc.mesh(), [(c.value, c.index) for c in cps],
                                       args.thresholds)

    def fmt(v, inf):
        return inf if v is None else f"{v:+.4f}"

    rows = [(fmt(st.lower, "-inf"), fmt(st.upper, "+inf"), st.expected, st.observed,
             "ok" if st.ok else "FAIL") for st in report.steps]
    print(_table(rows, ("from", "to", "expected", "observed", "")))
    print("passed" if report.passed else "failed")
    return 0 if report.passed else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="morsewitten",
                                 description="Morse-Witten complexes on implicit surfaces")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered scenarios").set_defaults(func=_cmd_list)

    r = sub.add_parser("run", help="run a scenario end to end ('all' for every one)")
    r.add_argument("scenario")
    r.add_argument("--report", help="JSON report path (a directory with 'all')")
    r.add_argument("--export-flowlines", metavar="DIR")
    r.add_argument("--format", choices=("csv", "svg"), default="csv")
    r.add_argument("--plane", choices=("xy", "xz", "yz"), default="xz",
                   help="projection plane for SVG export")
    r.add_argument("--seeds", type=int)
    r.add_argument("--tol-grad", type=float)
    r.add_argument("--jobs", type=int)
    r.set_defaults(func=_cmd_run)

    m = sub.add_parser("mesh-homology", help="simplicial homology of an OFF mesh")
    m.add_argument("path")
    m.add_argument("--values")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=_cmd_mesh_homology)

    f = sub.add_parser("filtration", help="sublevel filtration check on the scenario mesh")
    f.add_argument("scenario")
    f.add_argument("--thresholds", type=float, nargs="+")
    f.set_defaults(func=_cmd_filtration)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MorseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
