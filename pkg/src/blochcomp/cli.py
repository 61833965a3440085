"""blochcomp command line.

    blochcomp <classify|tau-profile|omega|closed-range|seminorm|net-check>
              --spec FILE [--alpha A] [--c C] [--r R] [--r0 R0] [--kmax K] [--out DIR]

Exit codes: 0 definite result, 1 input error, 2 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .adaptive import DEFAULT_BUDGET, Budget, Status
from .bloch_norms import norm
from .closed_range import (
    Evidence,
    NotBounded,
    closed_range_report,
    g_sample,
    net_check,
    omega_sample,
)
from .comp_operator import CRITERIA, NotASelfMap, TauParams, _tau, classify
from .disk_geometry import DomainError
from .specdoc import MapSpecDocument, SpecError, parse_spec

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2

DEFAULT_TAU_PROFILE_K = 12


def fmt(x: float) -> str:
    """17 significant digits, scientific."""
    return f"{float(x):.16e}"


def _read_spec(path: str) -> tuple[str, MapSpecDocument]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return text, parse_spec(text)


def _budget(doc: MapSpecDocument, args) -> Budget:
    b = DEFAULT_BUDGET.with_overrides(**doc.budget)
    if args.kmax is not None:
        k = args.kmax
        b = b.with_overrides(k_max=k, profile_k_max=k, min_levels=min(b.min_levels, k))
    return b


def _alpha(doc: MapSpecDocument, args) -> float:
    return float(args.alpha) if args.alpha is not None else doc.alpha


def _params(doc: MapSpecDocument, args) -> TauParams:
    if doc.map is None:
        raise SpecError("document has no 'map' entry")
    return TauParams(doc.map, _alpha(doc, args))


def _c_grid(args) -> list:
    raw = args.c if args.c is not None else "0.5"
    try:
        cs = [float(x) for x in str(raw).split(",") if x.strip()]
    except ValueError as exc:
        raise SpecError(f"--c: {exc}") from exc
    if not cs or any(not c > 0 for c in cs):
        raise SpecError("--c values must be positive")
    return cs


def _write_csv(path: Path | None, header, rows, stdout):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if path is None:
        stdout.write(buf.getvalue())
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue(), encoding="utf-8")


def _budget_line(b: Budget) -> str:
    return "budget: " + " ".join(f"{k}={v}" for k, v in b.as_dict().items())


def _record(args, text_digest, command, params, verdicts, timings):
    if args.out is None:
        return
    rec = {
        "input_digest": text_digest,
        "command": command,
        "parameters": params,
        "verdicts": verdicts,
    }
    if args.timings:
        rec["timings"] = timings
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_classify(doc, args, out) -> int:
    budget = _budget(doc, args)
    p = _params(doc, args)
    t0 = time.perf_counter()
    rep = classify(p, budget)
    elapsed = time.perf_counter() - t0
    v = rep.verdicts
    print(
        f"bounded: {v['bounded_HB_to_HB'].value}; compact: {v['compact_HB_to_HB'].value}; "
        f"HB->HB0: {v['bounded_HB_to_HB0'].value}",
        file=out,
    )
    for name in CRITERIA:
        print(f"  {name:22s} {v[name].value}", file=out)
    ts = rep.tau_sup
    print(f"tau_sup: {ts.value:.10g} ({ts.status.value}) witness {ts.witness:.6g}", file=out)
    for label, prof in (
        ("tau by |z|", rep.boundary_limit_by_base),
        ("tau by |phi|", rep.boundary_limit_by_image),
        ("phi little-Bloch", rep.phi_little_bloch),
    ):
        tail = ", ".join(f"{x:.4g}" for x in prof.values[-3:])
        extra = " (vacuous)" if prof.vacuous else ""
        print(f"{label}: {prof.verdict.value}{extra}; tail [{tail}]", file=out)
    print(_budget_line(budget), file=out)
    verdicts = {k: x.value for k, x in v.items()}
    _record(args, doc.digest, "classify", {"alpha": p.alpha, "budget": budget.as_dict()}, verdicts, {"classify": elapsed})
    return EXIT_OK if rep.definite() else EXIT_INCONCLUSIVE


def cmd_tau_profile(doc, args, out) -> int:
    p = _params(doc, args)
    k_max = args.kmax if args.kmax is not None else DEFAULT_TAU_PROFILE_K
    rays = args.rays
    if rays < 1 or k_max < 1:
        raise SpecError("--rays and --kmax must be positive")
    rows = []
    thetas = 2 * np.pi * np.arange(rays) / rays
    for k in range(1, k_max + 1):
        r = 1.0 - 2.0**-k
        t = _tau(p, r * np.exp(1j * thetas))
        rows.extend((fmt(r), fmt(th), fmt(tv)) for th, tv in zip(thetas, t))
    path = Path(args.out) / "tau_profile.csv" if args.out else None
    _write_csv(path, ["r", "theta", "tau"], rows, out)
    return EXIT_OK


def _omega_rows(om):
    return [(fmt(z.real), fmt(z.imag), fmt(t)) for z, t in zip(om.z, om.tau)]


def _gset_rows(g):
    return [(fmt(w.real), fmt(w.imag), fmt(z.real), fmt(z.imag)) for w, z in zip(g.w, g.preimage)]


def cmd_omega(doc, args, out) -> int:
    budget = _budget(doc, args)
    p = _params(doc, args)
    c = _c_grid(args)[0]
    om = omega_sample(p, c, budget)
    path = Path(args.out) / "omega.csv" if args.out else None
    _write_csv(path, ["re", "im", "tau"], _omega_rows(om), out)
    if path is not None:
        print(f"omega: c={c} points={len(om)} of {om.grid['points']}", file=out)
    return EXIT_OK


def cmd_net_check(doc, args, out) -> int:
    budget = _budget(doc, args)
    p = _params(doc, args)
    c = _c_grid(args)[0]
    r = args.r if args.r is not None else 0.5
    if not 0 < r < 1:
        raise SpecError("--r must lie in (0, 1)")
    g = g_sample(p, omega_sample(p, c, budget))
    res = net_check(g, r, budget=budget)
    print(
        f"net-check: c={c} r={r} covered {res.probes_covered}/{res.probes_total} "
        f"worst_gap {res.worst_gap:.6g} at {res.worst_probe:.6g}",
        file=out,
    )
    print(_budget_line(budget), file=out)
    return EXIT_OK


def cmd_closed_range(doc, args, out) -> int:
    budget = _budget(doc, args)
    p = _params(doc, args)
    cs = _c_grid(args)
    kw = {}
    if args.r0 is not None:
        if not 0 < args.r0 < 1:
            raise SpecError("--r0 must lie in (0, 1)")
        kw["r0_sweep"] = (args.r0,)
    if args.r is not None:
        if not 0 < args.r < 1:
            raise SpecError("--r must lie in (0, 1)")
        kw["r"] = args.r
    t0 = time.perf_counter()
    try:
        rep = closed_range_report(p, cs, budget, **kw)
    except NotBounded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - t0
    print(f"closed range: {rep.verdict.value}", file=out)
    bb = rep.bounded_below
    print(f"K (tau sup): {rep.K:.10g}; bounded-below estimate {bb.eps_est:.6g} ({bb.minimizer})", file=out)
    outdir = Path(args.out) if args.out else Path(".")
    for i, lv in enumerate(rep.levels):
        ann = ", ".join(f"r0={a.r0:g}:{a.verdict.value}" for a in lv.annulus)
        samp = f"{lv.sampling.S_est:.6g} ({lv.sampling.minimizer})" if lv.sampling else "n/a"
        print(
            f"c={lv.c:g}: |Omega|={len(lv.omega)} |G|={len(lv.g)} "
            f"net r={lv.net_r:.4g} covered {lv.net.probes_covered}/{lv.net.probes_total} "
            f"(worst gap {lv.net.worst_gap:.4g}); annulus {ann}; sampling {samp}",
            file=out,
        )
        suffix = "" if len(rep.levels) == 1 else f"_c{i}"
        _write_csv(outdir / f"omega{suffix}.csv", ["re", "im", "tau"], _omega_rows(lv.omega), out)
        _write_csv(outdir / f"gset{suffix}.csv", ["re", "im", "preimage_re", "preimage_im"], _gset_rows(lv.g), out)
    print(_budget_line(budget), file=out)
    _record(
        args,
        doc.digest,
        "closed-range",
        {"alpha": p.alpha, "c": cs, "budget": budget.as_dict()},
        {"closed_range": rep.verdict.value},
        {"closed_range": elapsed},
    )
    return EXIT_INCONCLUSIVE if rep.verdict is Evidence.INCONCLUSIVE else EXIT_OK


def cmd_seminorm(doc, args, out) -> int:
    if doc.harmonic is None:
        print("error: seminorm needs 'h' and/or 'g' (or 'extremal') in the spec", file=sys.stderr)
        return EXIT_INPUT
    budget = _budget(doc, args)
    alpha = _alpha(doc, args)
    value, est = norm(doc.harmonic, alpha, budget)
    print(f"seminorm: {est.value:.12g}", file=out)
    print(f"norm: {value:.12g}", file=out)
    print(f"witness: {est.witness:.8g}", file=out)
    print(f"status: {est.status.value}", file=out)
    print(_budget_line(budget), file=out)
    return EXIT_INCONCLUSIVE if est.status is Status.INCONCLUSIVE else EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "tau-profile": cmd_tau_profile,
    "omega": cmd_omega,
    "closed-range": cmd_closed_range,
    "seminorm": cmd_seminorm,
    "net-check": cmd_net_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blochcomp", description="Composition operators on harmonic alpha-Bloch spaces.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", required=True, help="JSON spec document ('-' for stdin)")
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--c", help="level c, or a comma-separated list for closed-range")
    ap.add_argument("--r", type=float)
    ap.add_argument("--r0", type=float)
    ap.add_argument("--kmax", type=int)
    ap.add_argument("--rays", type=int, default=8, help="tau-profile: number of rays")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--timings", action="store_true", help="include timings in run.json")
    return ap


def main(argv=None, stdout=None) -> int:
    out = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.alpha is not None and not (math.isfinite(args.alpha) and args.alpha > 0):
        print("error: --alpha must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        _, doc = _read_spec(args.spec)
        return COMMANDS[args.command](doc, args, out)
    except NotASelfMap as exc:
        print(f"error: {exc} (witness {exc.witness})", file=sys.stderr)
        return EXIT_INPUT
    except (SpecError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
