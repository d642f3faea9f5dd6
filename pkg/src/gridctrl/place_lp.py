"""Node-pair placement by minimum LP control effort.

For a candidate set of HVDC node pairs, the effort to force a target set of
line-flow changes is min sum |P_DC| subject to CV * P_DC = delta on the
target lines and |P_DC| <= p_dc_max.  Each setpoint is split into a
nonnegative positive and negative part, so the problem lands directly in the
bounded-variable equality form of the embedded solver with exactly one
equality row per target line.

Deltas follow one of three strategies (fixed MW, fraction of the line limit,
scaled reactance) and always take the canonical positive sign; efforts and
bounds are handled in MW, which is self-consistent because the PTDF and CV
entries are dimensionless.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .dcsens import PtdfMatrix, cv
from .netmodel import Network
from .simplex import LpProblem, SimplexNumericalError, solve_lp

CONSTANT_MW = "constant"
OF_LIMIT = "fraction-of-limit"
OF_REACTANCE = "scaled-reactance"


@dataclass(frozen=True)
class DeltaStrategy:
    """Target flow-change magnitude per line, in MW (always positive)."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in (CONSTANT_MW, OF_LIMIT, OF_REACTANCE):
            raise ValueError(f"unknown delta strategy '{self.kind}'")
        if not self.param > 0.0:
            raise ValueError(f"strategy parameter must be > 0, got {self.param}")

    @classmethod
    def constant(cls, mw: float = 100.0) -> "DeltaStrategy":
        return cls(kind=CONSTANT_MW, param=mw)

    @classmethod
    def fraction_of_limit(cls, fraction: float = 0.1) -> "DeltaStrategy":
        return cls(kind=OF_LIMIT, param=fraction)

    @classmethod
    def scaled_reactance(cls, scale: float = 1000.0) -> "DeltaStrategy":
        return cls(kind=OF_REACTANCE, param=scale)

    def deltas(self, net: Network, line_ids: tuple[int, ...]) -> np.ndarray:
        """MW delta per requested line id."""
        out = np.empty(len(line_ids))
        for i, lid in enumerate(line_ids):
            ln = net.line_by_id(lid)
            if self.kind == CONSTANT_MW:
                out[i] = self.param
            elif self.kind == OF_LIMIT:
                if math.isinf(ln.limit):
                    raise ValueError(
                        f"line {lid} has no limit; the {OF_LIMIT} strategy needs one")
                out[i] = self.param * ln.limit * net.base_mva
            else:
                out[i] = self.param * ln.reactance
        return out


@dataclass(frozen=True)
class EffortResult:
    total_effort: float         # MW, summed over all feasible target sets
    infeasible_sets: int
    lp_count: int

    @property
    def all_infeasible(self) -> bool:
        return self.lp_count > 0 and self.infeasible_sets == self.lp_count


def _effort(cv_rows: np.ndarray, deltas: np.ndarray, p_dc_max: float) -> float | None:
    """min sum|P_DC| for CV_rows @ P_DC = deltas; None when infeasible."""
    k, n_dc = cv_rows.shape
    problem = LpProblem.build(
        c=np.ones(2 * n_dc),
        a_eq=np.hstack([cv_rows, -cv_rows]),
        b_eq=deltas,
        lower=np.zeros(2 * n_dc),
        upper=np.full(2 * n_dc, p_dc_max),
    )
    res = solve_lp(problem)
    if res.status == "infeasible":
        return None
    if res.status != "optimal":
        raise SimplexNumericalError(f"effort LP ended '{res.status}'")
    return float(res.objective)


def control_effort(mat: PtdfMatrix, placements: list[tuple[int, int]],
                   targets: list[int], strategy: DeltaStrategy,
                   p_dc_max: float = math.inf, *, net: Network
                   ) -> float | None:
    """Minimum total |P_DC| in MW to realize the strategy's deltas on
    ``targets``; None when infeasible.  Requires |targets| == |placements|."""
    if len(targets) != len(placements):
        raise ValueError(
            f"need as many targets as controllers: {len(targets)} vs {len(placements)}")
    if len(set(targets)) != len(targets):
        raise ValueError("target line ids must be distinct")
    in_service = {lid: k for k, lid in enumerate(mat.line_ids)}
    for lid in targets:
        if lid not in in_service:
            raise KeyError(f"no in-service line with id {lid}")
    cols = np.column_stack([cv(mat, m, n).values for m, n in placements])
    rows = [in_service[lid] for lid in targets]
    deltas = strategy.deltas(net, tuple(targets))
    return _effort(cols[rows, :], deltas, p_dc_max)


def place_lp_next(net: Network, mat: PtdfMatrix,
                  existing: list[tuple[int, int]], strategy: DeltaStrategy,
                  p_dc_max: float = math.inf
                  ) -> list[tuple[tuple[int, int], EffortResult]]:
    """Rank every node pair (placed ones included) as the next controller.

    Each candidate is scored by the summed effort over every
    C(n_L, k) target set with k = len(existing) + 1; infeasible sets are
    counted, and a candidate with no feasible set at all ranks last.
    """
    bus_order = sorted(mat.bus_ids)
    pairs = [(m, n) for i, m in enumerate(bus_order) for n in bus_order[i + 1:]]
    k = len(existing) + 1
    line_ids = mat.line_ids
    target_sets = list(itertools.combinations(range(len(line_ids)), k))
    all_deltas = strategy.deltas(net, line_ids)
    existing_cols = [cv(mat, m, n).values for m, n in existing]

    def score(pair: tuple[int, int]) -> EffortResult:
        cols = np.column_stack(existing_cols + [cv(mat, *pair).values])
        total = 0.0
        infeasible = 0
        for rows in target_sets:
            effort = _effort(cols[list(rows), :], all_deltas[list(rows)], p_dc_max)
            if effort is None:
                infeasible += 1
            else:
                total += effort
        return EffortResult(total_effort=total, infeasible_sets=infeasible,
                            lp_count=len(target_sets))

    results = list(ordered_map(score, pairs))
    ranked = sorted(zip(pairs, results),
                    key=lambda item: (item[1].all_infeasible, item[1].total_effort, item[0]))
    return ranked


def run_lp_placement(net: Network, mat: PtdfMatrix, count: int,
                     strategy: DeltaStrategy, p_dc_max: float = math.inf
                     ) -> tuple[list[tuple[int, int]],
                                list[list[tuple[tuple[int, int], EffortResult]]]]:
    """Place ``count`` controllers greedily; returns placements and tables."""
    if count < 1:
        raise ValueError("count must be >= 1")
    placements: list[tuple[int, int]] = []
    tables = []
    for _ in range(count):
        ranked = place_lp_next(net, mat, placements, strategy, p_dc_max)
        tables.append(ranked)
        placements.append(ranked[0][0])
    return placements, tables


@dataclass(frozen=True)
class ComparisonRow:
    step: int
    cv_pair: tuple[int, int]
    lp_pair: tuple[int, int]
    agree: bool


def compare_placements(cv_placements: list[tuple[int, int]],
                       lp_placements: list[tuple[int, int]]) -> list[ComparisonRow]:
    """Step-by-step agreement table of the two algorithms' choices."""
    if len(cv_placements) != len(lp_placements):
        raise ValueError("placement sequences must have the same length")
    return [ComparisonRow(step=i + 1, cv_pair=tuple(a), lp_pair=tuple(b),
                          agree=tuple(a) == tuple(b))
            for i, (a, b) in enumerate(zip(cv_placements, lp_placements))]
