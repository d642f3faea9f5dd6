"""Controller-count bounds and the node-balance system P_B = A @ P_L.

``A`` is the signed bus/line incidence: +1 where a line leaves its from-bus,
-1 where it enters its to-bus, so a positive flow means from->to transport.
Series controllers can pin at most n_L - n_B + 1 flows (the cycle space);
parallel controllers can steer at most n_B - 1 independent directions
(the rank of the PTDF).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dcsens import InjectionProfile, PtdfMatrix, cv, ptdf
from .netmodel import Network, connected_components

RANK_REL_TOL = 1e-8


def matrix_rank(a: np.ndarray) -> int:
    """Rank via singular values with a relative 1e-8 threshold."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_REL_TOL * s[0]))


def incidence_matrix(net: Network) -> np.ndarray:
    """Signed incidence over in-service lines, (n_B, n_L)."""
    lines = net.lines_in_service
    a = np.zeros((net.n_bus, len(lines)))
    for k, ln in enumerate(lines):
        a[net.bus_index[ln.from_bus], k] = 1.0
        a[net.bus_index[ln.to_bus], k] = -1.0
    return a


@dataclass(frozen=True, eq=False)
class IncidenceSystem:
    a: np.ndarray               # (n_B, n_L) signed incidence
    p_b: np.ndarray             # (n_B,) nodal injections
    line_ids: tuple[int, ...]


def incidence_system(net: Network, inj: InjectionProfile) -> IncidenceSystem:
    if inj.p.shape != (net.n_bus,):
        raise ValueError(f"injection length {inj.p.shape[0]} != n_bus {net.n_bus}")
    return IncidenceSystem(a=incidence_matrix(net), p_b=inj.p.copy(),
                           line_ids=tuple(ln.id for ln in net.lines_in_service))


@dataclass(frozen=True)
class BoundsReport:
    series_bound: int           # sup count of series (flow-pinning) devices
    parallel_bound: int         # sup count of independent node-pair controllers
    ptdf_rank: int


def bounds(net: Network) -> BoundsReport:
    if len(connected_components(net)) != 1:
        raise ValueError("bounds require a connected network")
    n_b, n_l = net.n_bus, net.n_line
    return BoundsReport(
        series_bound=n_l - n_b + 1,
        parallel_bound=n_b - 1,
        ptdf_rank=matrix_rank(ptdf(net).values),
    )


@dataclass(frozen=True, eq=False)
class FixedFlowResult:
    status: str                             # unique | underdetermined | inconsistent
    flows: np.ndarray | None = None         # full in-service-line vector when unique
    freedom: int | None = None              # remaining degrees of freedom


def solve_fixed_flows(net: Network, inj: InjectionProfile,
                      fixed: dict[int, float]) -> FixedFlowResult:
    """Classify the node-balance system once ``fixed`` line flows are pinned.

    ``fixed`` maps line id -> flow (p.u., from->to sign).  Unknown ids raise.
    """
    sys = incidence_system(net, inj)
    id_to_col = {lid: k for k, lid in enumerate(sys.line_ids)}
    for lid in fixed:
        if lid not in id_to_col:
            raise KeyError(f"no in-service line with id {lid}")
    fixed_cols = [id_to_col[lid] for lid in fixed]
    fixed_vals = np.array([fixed[lid] for lid in fixed], dtype=float)
    free_cols = [k for k in range(len(sys.line_ids)) if k not in set(fixed_cols)]

    rhs = sys.p_b - (sys.a[:, fixed_cols] @ fixed_vals if fixed_cols else 0.0)
    a_free = sys.a[:, free_cols]
    r = matrix_rank(a_free)
    r_aug = matrix_rank(np.column_stack([a_free, rhs]))
    if r_aug > r:
        return FixedFlowResult(status="inconsistent")
    if r < len(free_cols):
        return FixedFlowResult(status="underdetermined", freedom=len(free_cols) - r)
    flows = np.empty(len(sys.line_ids))
    flows[fixed_cols] = fixed_vals
    if free_cols:
        sol, *_ = np.linalg.lstsq(a_free, rhs, rcond=None)
        flows[free_cols] = sol
    return FixedFlowResult(status="unique", flows=flows)


def controllability_rank(placements: list[tuple[int, int]], mat: PtdfMatrix) -> int:
    """Rank of the stacked CV columns, capped by n_B - 1."""
    if not placements:
        return 0
    cols = np.column_stack([cv(mat, m, n).values for m, n in placements])
    return min(matrix_rank(cols), len(mat.bus_ids) - 1)
