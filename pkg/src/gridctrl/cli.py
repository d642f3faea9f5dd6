"""Command-line frontend.

Usage: gridctrl <subcommand> <case> [options]

Exit codes: 0 success, 1 domain infeasibility, 2 input error.  Every failure
prints a single line to stderr starting with "error: " (exit 2) or
"infeasible: " (exit 1).  Outputs are deterministic byte-for-byte: CSV uses
12 significant digits, '.' decimals, ',' separators and LF endings; JSON
uses Python's shortest-round-trip float form.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import opf as opf_mod
from .bounds import bounds as bounds_op
from .bounds import solve_fixed_flows
from .dcsens import InjectionProfile, cv, lodf, ptdf
from .netmodel import (
    MATPOWER_SUBSET,
    NATIVE_JSON,
    CaseFormatError,
    Network,
    merge_parallel_lines,
    parse_case,
    validate,
)
from .place_cv import (
    CANDIDATE_CAP,
    COS_THRESHOLD,
    metric_report,
    run_cv_placement,
)
from .place_lp import DeltaStrategy, compare_placements, run_lp_placement
from .simplex import SimplexNumericalError, SimplexStallError

_STRATEGY_FLAGS = {"const": "constant", "limit": "fraction_of_limit",
                   "reactance": "scaled_reactance"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


class CliError(Exception):
    """Input-side failure; reported as 'error: ...' with exit 2."""


class DomainInfeasible(Exception):
    """Domain-side infeasibility; reported as 'infeasible: ...' with exit 1."""


def _fmt(x: float) -> str:
    """CSV number form: 12 significant digits, minus-zero normalized."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if x == 0:
        x = abs(x)
    return format(float(x), ".12g")


def _pair_str(pair: tuple[int, int]) -> str:
    return f"{pair[0]}-{pair[1]}"


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"expected a pair 'M,N', got '{text}'")
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise CliError(f"pair entries must be integers, got '{text}'") from None
    return m, n


def _parse_fix(text: str) -> tuple[int, float]:
    lhs, sep, rhs = text.partition("=")
    if not sep:
        raise CliError(f"expected 'LINE=MW', got '{text}'")
    try:
        return int(lhs), float(rhs)
    except ValueError:
        raise CliError(f"expected integer line id and MW value, got '{text}'") from None


def _load(args) -> Network:
    path = Path(args.case)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read case file: {exc}") from exc
    fmt = args.format
    if fmt == "auto":
        fmt = MATPOWER_SUBSET if path.suffix == ".m" else NATIVE_JSON
    net = parse_case(text, fmt)
    violations = validate(net)
    if violations:
        raise CliError(
            "case failed validation: "
            + "; ".join(f"[{v.code}] {v.message}" for v in violations))
    return merge_parallel_lines(net)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _nominal_injection(net: Network) -> InjectionProfile:
    """Loads as given, generation at equal fractional output to match them."""
    total_load = sum(net.load_vector)
    p_min = sum(g.p_min for g in net.generators)
    p_max = sum(g.p_max for g in net.generators)
    if not net.generators:
        if abs(total_load) > 1e-12:
            raise CliError("case has loads but no generators to supply them")
        return InjectionProfile(np.zeros(net.n_bus))
    span = p_max - p_min
    t = 0.0 if span <= 0.0 else (total_load - p_min) / span
    if t < -1e-12 or t > 1.0 + 1e-12 or (span <= 0.0 and abs(total_load - p_min) > 1e-9):
        raise CliError(
            f"total load {total_load * net.base_mva:g} MW is outside the "
            f"generation range [{p_min * net.base_mva:g}, {p_max * net.base_mva:g}] MW")
    p = -np.array(net.load_vector)
    for g in net.generators:
        p[net.bus_index[g.bus]] += g.p_min + t * (g.p_max - g.p_min)
    return InjectionProfile(p)


def _strategy(args) -> DeltaStrategy:
    ctor = getattr(DeltaStrategy, _STRATEGY_FLAGS[args.strategy])
    return ctor(args.param) if args.param is not None else ctor()


# --------------------------------------------------------------------------
# subcommand bodies


def _cmd_validate(args) -> int:
    path = Path(args.case)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read case file: {exc}") from exc
    fmt = args.format
    if fmt == "auto":
        fmt = MATPOWER_SUBSET if path.suffix == ".m" else NATIVE_JSON
    net = parse_case(text, fmt)
    violations = validate(net)
    if args.output == "json":
        _emit(args, _json_text([{"code": v.code, "message": v.message}
                                for v in violations]))
    else:
        lines = ["code,message"]
        lines += [f"{v.code},\"{v.message}\"" for v in violations]
        _emit(args, "\n".join(lines) + "\n")
    if violations:
        print(f"error: case has {len(violations)} violation(s)", file=sys.stderr)
        return 2
    return 0


def _cmd_ptdf(args) -> int:
    net = _load(args)
    mat = ptdf(net)
    if args.output == "json":
        _emit(args, _json_text({
            "slack_bus": net.slack_id,
            "bus_ids": list(mat.bus_ids),
            "line_ids": list(mat.line_ids),
            "values": [[float(x) for x in row] for row in mat.values],
        }))
        return 0
    header = "line_id," + ",".join(f"bus_{b}" for b in mat.bus_ids)
    rows = [f"{lid}," + ",".join(_fmt(x) for x in mat.values[k])
            for k, lid in enumerate(mat.line_ids)]
    _emit(args, "\n".join([header] + rows) + "\n")
    return 0


def _cmd_cv(args) -> int:
    net = _load(args)
    mat = ptdf(net)
    if args.all == (args.pair is not None):
        raise CliError("choose exactly one of --pair M,N or --all")
    if args.all:
        order = sorted(mat.bus_ids)
        pairs = [(m, n) for i, m in enumerate(order) for n in order[i + 1:]]
    else:
        pairs = [args.pair]
    vecs = []
    for m, n in pairs:
        if m not in mat.bus_ids or n not in mat.bus_ids:
            raise CliError(f"unknown bus in pair {m},{n}")
        if m == n:
            raise CliError("pair buses must be distinct")
        vecs.append(cv(mat, m, n).values)
    if args.output == "json":
        _emit(args, _json_text({
            "line_ids": list(mat.line_ids),
            "pairs": [list(p) for p in pairs],
            "values": [[float(x) for x in v] for v in vecs],
        }))
        return 0
    header = "line_id," + ",".join(f"cv_{m}_{n}" for m, n in pairs)
    rows = [f"{lid}," + ",".join(_fmt(v[k]) for v in vecs)
            for k, lid in enumerate(mat.line_ids)]
    _emit(args, "\n".join([header] + rows) + "\n")
    return 0


def _cmd_lodf(args) -> int:
    net = _load(args)
    dist = lodf(net)
    if args.output == "json":
        values = [[None if math.isnan(x) else float(x) for x in row]
                  for row in dist.values]
        _emit(args, _json_text({
            "line_ids": list(dist.line_ids),
            "islanded": list(dist.islanded),
            "values": values,
        }))
        return 0
    header = "line_id," + ",".join(f"out_{lid}" for lid in dist.line_ids)
    rows = [f"{lid}," + ",".join(_fmt(x) for x in dist.values[k])
            for k, lid in enumerate(dist.line_ids)]
    _emit(args, "\n".join([header] + rows) + "\n")
    return 0


def _cmd_bounds(args) -> int:
    net = _load(args)
    rep = bounds_op(net)
    if args.output == "csv":
        _emit(args, "series_bound,parallel_bound,ptdf_rank\n"
                    f"{rep.series_bound},{rep.parallel_bound},{rep.ptdf_rank}\n")
        return 0
    payload = {"series_bound": rep.series_bound,
               "parallel_bound": rep.parallel_bound,
               "ptdf_rank": rep.ptdf_rank}
    _emit(args, json.dumps(payload, separators=(",", ":")) + "\n")
    return 0


def _cmd_fix_flows(args) -> int:
    net = _load(args)
    inj = _nominal_injection(net)
    fixed_pairs = [_parse_fix(item) for item in args.fix or []]
    seen = set()
    for lid, _ in fixed_pairs:
        if lid in seen:
            raise CliError(f"line {lid} fixed more than once")
        seen.add(lid)
    fixed = {lid: mw / net.base_mva for lid, mw in fixed_pairs}
    try:
        res = solve_fixed_flows(net, inj, fixed)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from exc
    line_ids = [ln.id for ln in net.lines_in_service]
    if args.output == "json":
        payload: dict = {"status": res.status}
        if res.status == "unique":
            payload["flows"] = [
                {"line_id": lid, "flow_mw": float(res.flows[k] * net.base_mva)}
                for k, lid in enumerate(line_ids)]
        elif res.status == "underdetermined":
            payload["freedom"] = res.freedom
        _emit(args, _json_text(payload))
        return 0
    lines = [f"status,{res.status}"]
    if res.status == "unique":
        lines.append("line_id,flow_mw")
        lines += [f"{lid},{_fmt(res.flows[k] * net.base_mva)}"
                  for k, lid in enumerate(line_ids)]
    elif res.status == "underdetermined":
        lines.append(f"freedom,{res.freedom}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_place_cv(args) -> int:
    net = _load(args)
    mat = ptdf(net)
    placements, tables = run_cv_placement(
        mat, args.count, cos_threshold=args.cos_threshold,
        candidate_cap=args.candidate_cap)
    if args.output == "json":
        steps = []
        for si, rows in enumerate(tables, start=1):
            steps.append({"step": si, "candidates": [
                {"pair": list(r.pair), "cos_phi": r.cos_phi,
                 "dimension": r.score.dimension,
                 "log_volume": r.score.log_volume,
                 "selected": r.selected} for r in rows]})
        _emit(args, _json_text({
            "placements": [list(p) for p in placements], "steps": steps}))
        return 0
    out = ["placement,pair"]
    out += [f"{i},{_pair_str(p)}" for i, p in enumerate(placements, start=1)]
    out.append("")
    out.append("step,pair,cos_phi,dimension,log_volume,selected")
    for si, rows in enumerate(tables, start=1):
        for r in rows:
            cos_txt = "" if r.cos_phi is None else _fmt(r.cos_phi)
            out.append(f"{si},{_pair_str(r.pair)},{cos_txt},"
                       f"{r.score.dimension},{_fmt(r.score.log_volume)},"
                       f"{int(r.selected)}")
    _emit(args, "\n".join(out) + "\n")
    return 0


def _cmd_place_lp(args) -> int:
    net = _load(args)
    mat = ptdf(net)
    strategy = _strategy(args)
    placements, tables = run_lp_placement(net, mat, args.count, strategy,
                                          p_dc_max=args.pdc_max)
    final = tables[-1]
    worst = max((r.total_effort for _p, r in final if not r.all_infeasible),
                default=0.0)

    def rel(r) -> float | None:
        if r.all_infeasible or worst <= 0.0:
            return None
        return 100.0 * r.total_effort / worst

    if args.output == "json":
        steps = []
        for rows in tables:
            steps.append([
                {"pair": list(p), "total_effort_mw": r.total_effort,
                 "infeasible_sets": r.infeasible_sets, "lp_count": r.lp_count}
                for p, r in rows])
        _emit(args, _json_text({
            "placements": [list(p) for p in placements],
            "steps": steps,
            "lp_count": sum(r.lp_count for _p, r in final),
        }))
        return 0
    out = ["placement,pair"]
    out += [f"{i},{_pair_str(p)}" for i, p in enumerate(placements, start=1)]
    out.append("")
    out.append("pair,total_effort_mw,relative_percent,infeasible_sets,lp_count")
    for p, r in final:
        rel_txt = "" if rel(r) is None else _fmt(rel(r))
        out.append(f"{_pair_str(p)},{_fmt(r.total_effort)},{rel_txt},"
                   f"{r.infeasible_sets},{r.lp_count}")
    out.append(f"lp_count={sum(r.lp_count for _p, r in final)}")
    _emit(args, "\n".join(out) + "\n")
    return 0


def _cmd_compare(args) -> int:
    net = _load(args)
    mat = ptdf(net)
    cv_placements, _ = run_cv_placement(
        mat, args.count, cos_threshold=args.cos_threshold,
        candidate_cap=args.candidate_cap)
    lp_placements, _ = run_lp_placement(net, mat, args.count, _strategy(args),
                                        p_dc_max=args.pdc_max)
    rows = compare_placements(cv_placements, lp_placements)
    if args.output == "json":
        _emit(args, _json_text([
            {"step": r.step, "cv_pair": list(r.cv_pair),
             "lp_pair": list(r.lp_pair), "agree": r.agree} for r in rows]))
        return 0
    out = ["step,cv_pair,lp_pair,agree"]
    out += [f"{r.step},{_pair_str(r.cv_pair)},{_pair_str(r.lp_pair)},{int(r.agree)}"
            for r in rows]
    _emit(args, "\n".join(out) + "\n")
    return 0


def _solution_payload(net: Network, sol) -> dict:
    payload: dict = {"status": sol.status}
    if sol.status != "optimal":
        return payload
    payload["cost"] = sol.cost
    payload["dispatch"] = [
        {"bus": g.bus, "p_mw": float(p)}
        for g, p in zip(net.generators, sol.dispatch.p_gen)]
    payload["flows"] = [
        {"line_id": lid, "flow_mw": float(f)}
        for lid, f in zip(sol.line_ids, sol.flows)]
    if sol.hvdc_base:
        payload["hvdc_base_mw"] = [float(x) for x in sol.hvdc_base]
    if sol.hvdc_contingency:
        payload["hvdc_contingency_mw"] = [
            {"contingency": cid, "p_mw": [float(x) for x in vec]}
            for cid, vec in sorted(sol.hvdc_contingency.items())]
    return payload


def _solution_csv(net: Network, sol) -> str:
    out = [f"status,{sol.status}"]
    if sol.status != "optimal":
        return "\n".join(out) + "\n"
    out.append(f"cost,{_fmt(sol.cost)}")
    out.append("")
    out.append("gen,bus,p_mw")
    for i, (g, p) in enumerate(zip(net.generators, sol.dispatch.p_gen), start=1):
        out.append(f"{i},{g.bus},{_fmt(p)}")
    out.append("")
    out.append("line_id,flow_mw")
    out += [f"{lid},{_fmt(f)}" for lid, f in zip(sol.line_ids, sol.flows)]
    if sol.hvdc_base:
        out.append("")
        out.append("hvdc,p_mw")
        out += [f"{j + 1},{_fmt(x)}" for j, x in enumerate(sol.hvdc_base)]
    if sol.hvdc_contingency:
        out.append("")
        out.append("contingency," + ",".join(
            f"hvdc_{j + 1}" for j in range(len(sol.hvdc_base))))
        for cid, vec in sorted(sol.hvdc_contingency.items()):
            out.append(f"{cid}," + ",".join(_fmt(x) for x in vec))
    return "\n".join(out) + "\n"


def _emit_solution(args, net: Network, sol) -> int:
    if args.output == "json":
        _emit(args, _json_text(_solution_payload(net, sol)))
    else:
        _emit(args, _solution_csv(net, sol))
    if sol.status != "optimal":
        raise DomainInfeasible("no dispatch satisfies the constraints")
    return 0


def _cmd_opf(args) -> int:
    net = _load(args)
    placements = [tuple(p) for p in args.place or []]
    sol = opf_mod.dc_opf(net, placements, p_dc_max=args.pdc_max,
                         n_segments=args.segments)
    return _emit_solution(args, net, sol)


def _cmd_sc_opf(args) -> int:
    net = _load(args)
    placements = [tuple(p) for p in args.place or []]
    conts = args.contingency if args.contingency else None
    try:
        sol = opf_mod.sc_opf(net, placements, contingencies=conts,
                             mode=args.mode, p_dc_max=args.pdc_max,
                             n_segments=args.segments)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    return _emit_solution(args, net, sol)


def _cmd_cos_curve(args) -> int:
    net = _load(args)
    conts = args.contingency if args.contingency else None
    strategy = _strategy(args)
    try:
        curve = opf_mod.cos_curve(net, args.max, algorithm=args.algorithm,
                                  contingencies=conts, mode=args.mode,
                                  strategy=strategy, p_dc_max=args.pdc_max,
                                  n_segments=args.segments)
    except opf_mod.InfeasibleError as exc:
        raise DomainInfeasible(str(exc)) from exc
    if args.dat:
        dat = ["# controllers cos_percent"]
        dat += [f"{pt.count} {_fmt(pt.cos_percent)}" for pt in curve.points]
        Path(args.dat).write_text("\n".join(dat) + "\n")
    if args.output == "json":
        _emit(args, _json_text([
            {"count": pt.count,
             "pair": list(pt.pair) if pt.pair else None,
             "cos_percent": pt.cos_percent, "cos_abs": pt.cos_abs}
            for pt in curve.points]))
        return 0
    out = ["count,pair_m,pair_n,cos_percent,cos_abs"]
    for pt in curve.points:
        m = pt.pair[0] if pt.pair else ""
        n = pt.pair[1] if pt.pair else ""
        out.append(f"{pt.count},{m},{n},{_fmt(pt.cos_percent)},{_fmt(pt.cos_abs)}")
    _emit(args, "\n".join(out) + "\n")
    return 0


# --------------------------------------------------------------------------
# argument grammar


def _add_common(sub, default_output: str) -> None:
    sub.add_argument("case", help="path to the case file")
    sub.add_argument("--format", choices=["auto", NATIVE_JSON, MATPOWER_SUBSET],
                     default="auto", help="case format (auto = by extension)")
    sub.add_argument("--output", choices=["csv", "json"], default=default_output)
    sub.add_argument("--out", metavar="FILE", default=None,
                     help="write output to FILE instead of stdout")


def _add_lp_opts(sub) -> None:
    sub.add_argument("--strategy", choices=sorted(_STRATEGY_FLAGS),
                     default="const", help="target flow-change strategy")
    sub.add_argument("--param", type=float, default=None,
                     help="strategy parameter (MW, fraction, or scale)")
    sub.add_argument("--pdc-max", type=float, default=math.inf,
                     help="controller setpoint bound in MW (default unbounded)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridctrl", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("validate", help="report structural violations")
    _add_common(s, "json")
    s.set_defaults(fn=_cmd_validate)

    s = subs.add_parser("ptdf", help="dump the PTDF matrix")
    _add_common(s, "csv")
    s.set_defaults(fn=_cmd_ptdf)

    s = subs.add_parser("cv", help="dump controllability vectors")
    _add_common(s, "csv")
    s.add_argument("--pair", type=_parse_pair, metavar="M,N", default=None)
    s.add_argument("--all", action="store_true", help="every node pair")
    s.set_defaults(fn=_cmd_cv)

    s = subs.add_parser("lodf", help="dump the line outage distribution matrix")
    _add_common(s, "csv")
    s.set_defaults(fn=_cmd_lodf)

    s = subs.add_parser("bounds", help="controller-count bounds")
    _add_common(s, "json")
    s.set_defaults(fn=_cmd_bounds)

    s = subs.add_parser("fix-flows",
                        help="classify the flow system with lines pinned")
    _add_common(s, "json")
    s.add_argument("--fix", action="append", metavar="LINE=MW",
                   help="pin one line's flow (repeatable)")
    s.set_defaults(fn=_cmd_fix_flows)

    s = subs.add_parser("place-cv", help="greedy placement by conical volume")
    _add_common(s, "csv")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--cos-threshold", type=float, default=COS_THRESHOLD)
    s.add_argument("--candidate-cap", type=int, default=CANDIDATE_CAP)
    s.set_defaults(fn=_cmd_place_cv)

    s = subs.add_parser("place-lp", help="greedy placement by LP control effort")
    _add_common(s, "csv")
    s.add_argument("--count", type=int, required=True)
    _add_lp_opts(s)
    s.set_defaults(fn=_cmd_place_lp)

    s = subs.add_parser("compare-placements",
                        help="run both placement algorithms and diff them")
    _add_common(s, "csv")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--cos-threshold", type=float, default=COS_THRESHOLD)
    s.add_argument("--candidate-cap", type=int, default=CANDIDATE_CAP)
    _add_lp_opts(s)
    s.set_defaults(fn=_cmd_compare)

    s = subs.add_parser("opf", help="DC optimal power flow")
    _add_common(s, "json")
    s.add_argument("--place", type=_parse_pair, action="append", metavar="M,N",
                   help="HVDC node pair (repeatable)")
    s.add_argument("--pdc-max", type=float, default=math.inf)
    s.add_argument("--segments", type=int, default=opf_mod.DEFAULT_SEGMENTS)
    s.set_defaults(fn=_cmd_opf)

    s = subs.add_parser("sc-opf", help="security-constrained DC OPF")
    _add_common(s, "json")
    s.add_argument("--mode", choices=[opf_mod.PREVENTIVE, opf_mod.CORRECTIVE],
                   default=opf_mod.PREVENTIVE)
    s.add_argument("--place", type=_parse_pair, action="append", metavar="M,N")
    s.add_argument("--contingency", type=int, action="append", metavar="LINE",
                   help="line outage to secure against (default: all non-bridges)")
    s.add_argument("--pdc-max", type=float, default=math.inf)
    s.add_argument("--segments", type=int, default=opf_mod.DEFAULT_SEGMENTS)
    s.set_defaults(fn=_cmd_sc_opf)

    s = subs.add_parser("cos-curve",
                        help="cost of security vs controller count")
    _add_common(s, "csv")
    s.add_argument("--max", type=int, required=True,
                   help="largest controller count on the curve")
    s.add_argument("--algorithm", choices=["cv", "lp"], default="cv")
    s.add_argument("--mode", choices=[opf_mod.PREVENTIVE, opf_mod.CORRECTIVE],
                   default=opf_mod.CORRECTIVE)
    s.add_argument("--contingency", type=int, action="append", metavar="LINE")
    s.add_argument("--segments", type=int, default=opf_mod.DEFAULT_SEGMENTS)
    s.add_argument("--dat", metavar="FILE", default=None,
                   help="also write a gnuplot-ready two-column data file")
    _add_lp_opts(s)
    s.set_defaults(fn=_cmd_cos_curve)

    s = subs.add_parser("metrics",
                        help="1-norm vs conical-volume comparison table")
    _add_common(s, "csv")
    s.set_defaults(fn=_cmd_metrics)
    return parser


def _cmd_metrics(args) -> int:
    net = _load(args)
    rows, rho = metric_report(ptdf(net))
    if args.output == "json":
        _emit(args, _json_text({
            "spearman_rho": rho,
            "rows": [{"pair": list(r.pair), "norm1": r.norm1,
                      "log_volume": r.score.log_volume,
                      "dimension": r.score.dimension,
                      "rank_norm1": r.rank_norm1,
                      "rank_volume": r.rank_volume} for r in rows]}))
        return 0
    out = ["pair,norm1,log_volume,dimension,rank_norm1,rank_volume"]
    out += [f"{_pair_str(r.pair)},{_fmt(r.norm1)},{_fmt(r.score.log_volume)},"
            f"{r.score.dimension},{r.rank_norm1},{r.rank_volume}" for r in rows]
    out.append(f"spearman_rho={_fmt(rho)}")
    _emit(args, "\n".join(out) + "\n")
    return 0


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except opf_mod.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except CaseFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except (SimplexStallError, SimplexNumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
