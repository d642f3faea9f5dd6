"""Network data model: case-file ingestion, validation, canonicalization.

All power quantities on a :class:`Network` (line limits, loads, generator
bounds) are stored in per-unit on ``base_mva``; reactances are per-unit as
given in the source file.  Case files carry MW values: the parsers divide by
``base_mva`` once on the way in and :func:`serialize_case` multiplies back on
the way out.  Generator cost coefficients are rescaled so the polynomial
takes per-unit power and still returns $/h.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from functools import cached_property

UNLIMITED = math.inf

NATIVE_JSON = "native-json"
MATPOWER_SUBSET = "matpower-subset"


class CaseFormatError(ValueError):
    """Malformed case file.  Carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None and col is not None:
            message = f"line {line}, col {col}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Bus:
    id: int
    is_slack: bool = False


@dataclass(frozen=True)
class Line:
    """AC line. ``reactance`` in p.u., ``limit`` in p.u. (inf = unlimited)."""

    id: int
    from_bus: int
    to_bus: int
    reactance: float
    limit: float = UNLIMITED
    in_service: bool = True


@dataclass(frozen=True)
class Generator:
    """``p_min``/``p_max`` in p.u.; ``cost`` = (c0, c1, c2) with p in p.u., $/h out."""

    bus: int
    p_min: float
    p_max: float
    cost: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def cost_at(self, p: float) -> float:
        c0, c1, c2 = self.cost
        return c0 + c1 * p + c2 * p * p


@dataclass(frozen=True)
class Load:
    """Constant-power demand, ``p`` in p.u. on the system base."""

    bus: int
    p: float


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    generators: tuple[Generator, ...] = ()
    loads: tuple[Load, ...] = ()
    base_mva: float = 100.0

    @cached_property
    def bus_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.buses)

    @cached_property
    def bus_index(self) -> dict[int, int]:
        return {b.id: i for i, b in enumerate(self.buses)}

    @cached_property
    def lines_in_service(self) -> tuple[Line, ...]:
        return tuple(ln for ln in self.lines if ln.in_service)

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    @property
    def n_line(self) -> int:
        """Number of in-service lines (the n_L used by every matrix)."""
        return len(self.lines_in_service)

    @cached_property
    def slack_id(self) -> int:
        slacks = [b.id for b in self.buses if b.is_slack]
        if len(slacks) != 1:
            raise ValueError(f"network has {len(slacks)} slack buses, need exactly 1")
        return slacks[0]

    @property
    def slack_index(self) -> int:
        return self.bus_index[self.slack_id]

    def line_by_id(self, line_id: int) -> Line:
        for ln in self.lines:
            if ln.id == line_id:
                return ln
        raise KeyError(f"no line with id {line_id}")

    @cached_property
    def load_vector(self) -> tuple[float, ...]:
        """Per-bus demand in p.u., in bus order."""
        acc = [0.0] * self.n_bus
        for ld in self.loads:
            acc[self.bus_index[ld.bus]] += ld.p
        return tuple(acc)


def connected_components(net: Network) -> list[set[int]]:
    """Connected components (sets of bus ids) over in-service lines."""
    adj: dict[int, set[int]] = {b.id: set() for b in net.buses}
    for ln in net.lines_in_service:
        if ln.from_bus in adj and ln.to_bus in adj:
            adj[ln.from_bus].add(ln.to_bus)
            adj[ln.to_bus].add(ln.from_bus)
    seen: set[int] = set()
    comps: list[set[int]] = []
    for start in adj:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        comps.append(comp)
    return comps


def validate(net: Network) -> list[Violation]:
    """Structural checks.  Returns a report; an empty list means valid."""
    out: list[Violation] = []
    seen_bus: set[int] = set()
    for b in net.buses:
        if b.id in seen_bus:
            out.append(Violation("duplicate-bus-id", f"bus id {b.id} appears more than once"))
        seen_bus.add(b.id)
    slacks = [b.id for b in net.buses if b.is_slack]
    if len(slacks) != 1:
        out.append(Violation("slack-count", f"expected exactly 1 slack bus, found {len(slacks)}"))
    seen_line: set[int] = set()
    for ln in net.lines:
        if ln.id in seen_line:
            out.append(Violation("duplicate-line-id", f"line id {ln.id} appears more than once"))
        seen_line.add(ln.id)
        for end in (ln.from_bus, ln.to_bus):
            if end not in seen_bus:
                out.append(Violation("dangling-bus", f"line {ln.id} references missing bus {end}"))
        if ln.from_bus == ln.to_bus:
            out.append(Violation("self-loop", f"line {ln.id} connects bus {ln.from_bus} to itself"))
        if not ln.reactance > 0.0:
            out.append(Violation("bad-reactance", f"line {ln.id} reactance must be > 0, got {ln.reactance}"))
        if not ln.limit > 0.0:
            out.append(Violation("bad-limit", f"line {ln.id} limit must be > 0 or unlimited, got {ln.limit}"))
    for i, g in enumerate(net.generators):
        if g.bus not in seen_bus:
            out.append(Violation("dangling-bus", f"generator {i} references missing bus {g.bus}"))
        if g.p_min > g.p_max:
            out.append(Violation("gen-bounds", f"generator {i} has p_min {g.p_min} > p_max {g.p_max}"))
        if g.cost[2] < 0.0:
            out.append(Violation("nonconvex-cost", f"generator {i} has negative quadratic cost coefficient"))
    for i, ld in enumerate(net.loads):
        if ld.bus not in seen_bus:
            out.append(Violation("dangling-bus", f"load {i} references missing bus {ld.bus}"))
        if ld.p < 0.0:
            out.append(Violation("negative-load", f"load {i} has negative demand {ld.p}"))
    if net.buses and not any(v.code == "dangling-bus" for v in out):
        comps = connected_components(net)
        if len(comps) > 1:
            anchor = slacks[0] if len(slacks) == 1 else net.buses[0].id
            main = next(c for c in comps if anchor in c)
            stranded = sorted(set(net.bus_ids) - main)
            out.append(Violation(
                "disconnected",
                "network is not connected; buses unreachable from bus "
                f"{anchor}: {', '.join(str(b) for b in stranded)}",
            ))
    return out


def merge_parallel_lines(net: Network) -> Network:
    """Collapse each group of in-service parallel lines into one equivalent.

    The equivalent keeps the smallest line id of the group, takes
    1 / sum(1/x_i) as reactance and the sum of limits.  Out-of-service lines
    pass through untouched.  Idempotent.
    """
    groups: dict[tuple[int, int], list[Line]] = {}
    for ln in net.lines:
        if ln.in_service:
            key = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
            groups.setdefault(key, []).append(ln)
    merged_of: dict[int, Line] = {}
    for key, members in groups.items():
        if len(members) < 2:
            continue
        keep = min(members, key=lambda ln: ln.id)
        x_eq = 1.0 / sum(1.0 / ln.reactance for ln in members)
        limit = sum(ln.limit for ln in members)
        merged_of[keep.id] = Line(
            id=keep.id, from_bus=keep.from_bus, to_bus=keep.to_bus,
            reactance=x_eq, limit=limit, in_service=True,
        )
        for ln in members:
            if ln.id != keep.id:
                merged_of[ln.id] = None  # type: ignore[assignment]
    if not merged_of:
        return net
    new_lines = []
    for ln in net.lines:
        if ln.id in merged_of:
            repl = merged_of[ln.id]
            if repl is not None:
                new_lines.append(repl)
        else:
            new_lines.append(ln)
    return replace(net, lines=tuple(new_lines))


# ---------------------------------------------------------------------------
# native JSON format

def _req(doc: dict, key: str, kind: type, where: str):
    if key not in doc:
        raise CaseFormatError(f"{where}: missing required key '{key}'")
    val = doc[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise CaseFormatError(f"{where}: key '{key}' must be a number, got {type(val).__name__}")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise CaseFormatError(f"{where}: key '{key}' must be an integer, got {type(val).__name__}")
        return val
    if not isinstance(val, kind):
        raise CaseFormatError(f"{where}: key '{key}' must be {kind.__name__}, got {type(val).__name__}")
    return val


def _parse_native(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseFormatError(exc.msg, line=exc.lineno, col=exc.colno) from exc
    if not isinstance(doc, dict):
        raise CaseFormatError("top level must be a JSON object")
    base = _req(doc, "base_mva", float, "case")
    if base <= 0.0:
        raise CaseFormatError("base_mva must be > 0")
    for key in ("buses", "lines", "generators", "loads"):
        if key in doc and not isinstance(doc[key], list):
            raise CaseFormatError(f"key '{key}' must be an array")
    known = {"base_mva", "buses", "lines", "generators", "loads", "name"}
    for key in doc:
        if key not in known:
            raise CaseFormatError(f"unknown top-level key '{key}'")

    buses = []
    for i, b in enumerate(doc.get("buses", [])):
        where = f"buses[{i}]"
        if not isinstance(b, dict):
            raise CaseFormatError(f"{where}: must be an object")
        buses.append(Bus(id=_req(b, "id", int, where), is_slack=bool(b.get("is_slack", False))))

    lines = []
    for i, l in enumerate(doc.get("lines", [])):
        where = f"lines[{i}]"
        if not isinstance(l, dict):
            raise CaseFormatError(f"{where}: must be an object")
        raw_limit = l.get("limit", "unlimited")
        if raw_limit == "unlimited":
            limit = UNLIMITED
        elif isinstance(raw_limit, (int, float)) and not isinstance(raw_limit, bool):
            limit = float(raw_limit) / base
        else:
            raise CaseFormatError(f"{where}: limit must be a number or \"unlimited\"")
        lines.append(Line(
            id=_req(l, "id", int, where),
            from_bus=_req(l, "from_bus", int, where),
            to_bus=_req(l, "to_bus", int, where),
            reactance=_req(l, "reactance", float, where),
            limit=limit,
            in_service=bool(l.get("in_service", True)),
        ))

    gens = []
    for i, g in enumerate(doc.get("generators", [])):
        where = f"generators[{i}]"
        if not isinstance(g, dict):
            raise CaseFormatError(f"{where}: must be an object")
        cost_raw = g.get("cost", [0.0, 0.0, 0.0])
        if (not isinstance(cost_raw, list) or len(cost_raw) > 3
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in cost_raw)):
            raise CaseFormatError(f"{where}: cost must be [c0], [c0,c1] or [c0,c1,c2]")
        c = list(cost_raw) + [0.0] * (3 - len(cost_raw))
        gens.append(Generator(
            bus=_req(g, "bus", int, where),
            p_min=_req(g, "p_min", float, where) / base,
            p_max=_req(g, "p_max", float, where) / base,
            cost=(float(c[0]), float(c[1]) * base, float(c[2]) * base * base),
        ))

    loads = []
    for i, d in enumerate(doc.get("loads", [])):
        where = f"loads[{i}]"
        if not isinstance(d, dict):
            raise CaseFormatError(f"{where}: must be an object")
        loads.append(Load(bus=_req(d, "bus", int, where), p=_req(d, "p", float, where) / base))

    return Network(buses=tuple(buses), lines=tuple(lines),
                   generators=tuple(gens), loads=tuple(loads), base_mva=base)


def serialize_case(net: Network) -> str:
    """Emit the native JSON format (MW quantities), LF line endings."""
    base = net.base_mva
    doc: dict = {
        "base_mva": base,
        "buses": [
            {"id": b.id, "is_slack": b.is_slack} for b in net.buses
        ],
        "lines": [
            {
                "id": ln.id, "from_bus": ln.from_bus, "to_bus": ln.to_bus,
                "reactance": ln.reactance,
                "limit": "unlimited" if math.isinf(ln.limit) else ln.limit * base,
                "in_service": ln.in_service,
            }
            for ln in net.lines
        ],
        "generators": [
            {
                "bus": g.bus, "p_min": g.p_min * base, "p_max": g.p_max * base,
                "cost": [g.cost[0], g.cost[1] / base, g.cost[2] / (base * base)],
            }
            for g in net.generators
        ],
        "loads": [{"bus": d.bus, "p": d.p * base} for d in net.loads],
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# MATPOWER subset: mpc.bus / mpc.branch / mpc.gen / mpc.gencost only

_MATPOWER_BLOCKS = ("bus", "branch", "gen", "gencost")


def _parse_matpower_tables(text: str) -> tuple[dict[str, list[list[float]]], float]:
    tables: dict[str, list[list[float]]] = {}
    base_mva: float | None = None
    current: str | None = None

    def consume_rows(fragment: str, lineno: int) -> bool:
        """Parse rows inside an open block; True when the block closed."""
        closed = False
        end = fragment.find("]")
        if end >= 0:
            body, tail = fragment[:end], fragment[end + 1:].strip()
            if tail not in ("", ";"):
                raise CaseFormatError("unexpected content after ']'", line=lineno)
            closed = True
        else:
            body = fragment
        for chunk in body.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            row = []
            for tok in chunk.split():
                try:
                    row.append(float(tok))
                except ValueError:
                    col = fragment.find(tok) + 1
                    raise CaseFormatError(f"not a number: '{tok}'", line=lineno, col=col) from None
            tables[current].append(row)
        return closed

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if current is not None:
            if consume_rows(line, lineno):
                current = None
            continue
        if line.startswith("function"):
            continue
        m = re.match(r"mpc\.(\w+)\s*=\s*\[", line)
        if m:
            name = m.group(1)
            if name not in _MATPOWER_BLOCKS:
                raise CaseFormatError(f"unsupported matpower block 'mpc.{name}'", line=lineno, col=1)
            if name in tables:
                raise CaseFormatError(f"duplicate block 'mpc.{name}'", line=lineno, col=1)
            tables[name] = []
            current = name
            if consume_rows(line[m.end():], lineno):
                current = None
            continue
        m = re.fullmatch(r"mpc\.(\w+)\s*=\s*([^;]+);?", line)
        if m:
            name, value = m.group(1), m.group(2).strip()
            if name == "baseMVA":
                try:
                    base_mva = float(value)
                except ValueError:
                    raise CaseFormatError(f"baseMVA must be a number, got '{value}'", line=lineno) from None
            elif name == "version":
                pass
            else:
                raise CaseFormatError(f"unsupported matpower assignment 'mpc.{name}'", line=lineno, col=1)
            continue
        raise CaseFormatError(f"unrecognized statement: '{line}'", line=lineno, col=1)

    if current is not None:
        raise CaseFormatError(f"block 'mpc.{current}' not closed with ']'")
    if base_mva is None:
        raise CaseFormatError("missing mpc.baseMVA")
    if base_mva <= 0.0:
        raise CaseFormatError("mpc.baseMVA must be > 0")
    return tables, base_mva


def _parse_matpower(text: str) -> Network:
    tables, base = _parse_matpower_tables(text)
    for required in ("bus", "branch"):
        if required not in tables:
            raise CaseFormatError(f"missing block 'mpc.{required}'")

    buses: list[Bus] = []
    loads: list[Load] = []
    for i, row in enumerate(tables["bus"]):
        if len(row) < 13:
            raise CaseFormatError(f"bus row {i + 1}: expected >= 13 columns, got {len(row)}")
        bus_id, bus_type, pd = int(row[0]), int(row[1]), row[2]
        if row[4] != 0.0 or row[5] != 0.0:
            raise CaseFormatError(f"bus row {i + 1}: shunt elements (GS/BS) are not supported")
        if bus_type not in (1, 2, 3):
            raise CaseFormatError(f"bus row {i + 1}: unsupported bus type {bus_type}")
        buses.append(Bus(id=bus_id, is_slack=bus_type == 3))
        if pd != 0.0:
            loads.append(Load(bus=bus_id, p=pd / base))

    lines: list[Line] = []
    for i, row in enumerate(tables["branch"]):
        if len(row) < 11:
            raise CaseFormatError(f"branch row {i + 1}: expected >= 11 columns, got {len(row)}")
        tap, shift = row[8], (row[9] if len(row) > 9 else 0.0)
        if tap not in (0.0, 1.0):
            raise CaseFormatError(f"branch row {i + 1}: off-nominal tap {tap} is not supported")
        if shift != 0.0:
            raise CaseFormatError(f"branch row {i + 1}: phase shift {shift} is not supported")
        rate_a = row[5]
        lines.append(Line(
            id=i + 1,
            from_bus=int(row[0]),
            to_bus=int(row[1]),
            reactance=row[3],
            limit=UNLIMITED if rate_a == 0.0 else rate_a / base,
            in_service=row[10] != 0.0,
        ))

    gen_rows = tables.get("gen", [])
    cost_rows = tables.get("gencost", [])
    if cost_rows and len(cost_rows) != len(gen_rows):
        raise CaseFormatError(
            f"mpc.gencost has {len(cost_rows)} rows for {len(gen_rows)} generators")
    gens: list[Generator] = []
    for i, row in enumerate(gen_rows):
        if len(row) < 10:
            raise CaseFormatError(f"gen row {i + 1}: expected >= 10 columns, got {len(row)}")
        status = row[7]
        cost = (0.0, 0.0, 0.0)
        if cost_rows:
            crow = cost_rows[i]
            if len(crow) < 4:
                raise CaseFormatError(f"gencost row {i + 1}: expected >= 4 columns")
            model, ncost = int(crow[0]), int(crow[3])
            if model != 2:
                raise CaseFormatError(
                    f"gencost row {i + 1}: only polynomial cost model 2 is supported, got {model}")
            if ncost > 3 or ncost < 1 or len(crow) != 4 + ncost:
                raise CaseFormatError(
                    f"gencost row {i + 1}: expected 1..3 polynomial coefficients matching NCOST")
            coeffs = crow[4:4 + ncost]  # highest order first
            padded = [0.0] * (3 - ncost) + list(coeffs)
            c2, c1, c0 = padded
            cost = (c0, c1 * base, c2 * base * base)
        if status == 0.0:
            continue
        gens.append(Generator(bus=int(row[0]), p_min=row[9] / base, p_max=row[8] / base, cost=cost))

    return Network(buses=tuple(buses), lines=tuple(lines),
                   generators=tuple(gens), loads=tuple(loads), base_mva=base)


def _check_parsed(net: Network) -> None:
    """Hard parse-time checks; softer issues are left to validate()."""
    seen: set[int] = set()
    for b in net.buses:
        if b.id in seen:
            raise CaseFormatError(f"duplicate bus id {b.id}")
        seen.add(b.id)
    slack_count = sum(1 for b in net.buses if b.is_slack)
    if slack_count == 0:
        raise CaseFormatError("no slack bus defined")
    if slack_count > 1:
        raise CaseFormatError(f"{slack_count} slack buses defined, need exactly 1")
    seen_l: set[int] = set()
    for ln in net.lines:
        if ln.id in seen_l:
            raise CaseFormatError(f"duplicate line id {ln.id}")
        seen_l.add(ln.id)
        if not ln.reactance > 0.0:
            raise CaseFormatError(f"line {ln.id}: reactance must be > 0, got {ln.reactance}")


def parse_case(text: str, fmt: str = NATIVE_JSON) -> Network:
    """Parse a case file body.  ``fmt`` is 'native-json' or 'matpower-subset'."""
    if fmt == NATIVE_JSON:
        net = _parse_native(text)
    elif fmt == MATPOWER_SUBSET:
        net = _parse_matpower(text)
    else:
        raise ValueError(f"unknown case format '{fmt}'")
    _check_parsed(net)
    return net
