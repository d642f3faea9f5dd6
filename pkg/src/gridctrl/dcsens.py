"""DC sensitivities: susceptance matrices, PTDF, CV, TCSC derivative, LODF.

Matrix row/column order follows the network's bus and in-service-line file
order.  The bus susceptance matrix is singular; every inverse here deletes
the slack row and column, inverts the remainder, and re-inserts zero vectors
at the slack position.  Consequence: the slack column of the PTDF is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .netmodel import Network, connected_components

BALANCE_TOL = 1e-9


class DisconnectedNetworkError(ValueError):
    """The in-service graph is not connected; reduced matrices are singular."""


def _require_connected(net: Network) -> None:
    if net.n_bus == 0:
        raise DisconnectedNetworkError("network has no buses")
    comps = connected_components(net)
    if len(comps) > 1:
        raise DisconnectedNetworkError(
            f"network splits into {len(comps)} components over in-service lines")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SusceptanceMatrices:
    b_line: np.ndarray          # (n_L, n_B): row l = (1/x_l)(e_from - e_to)
    b_bus: np.ndarray           # (n_B, n_B): weighted graph Laplacian
    slack_index: int
    bus_ids: tuple[int, ...]
    line_ids: tuple[int, ...]


def build_susceptance(net: Network) -> SusceptanceMatrices:
    lines = net.lines_in_service
    n_b, n_l = net.n_bus, len(lines)
    b_line = np.zeros((n_l, n_b))
    for k, ln in enumerate(lines):
        b = 1.0 / ln.reactance
        b_line[k, net.bus_index[ln.from_bus]] = b
        b_line[k, net.bus_index[ln.to_bus]] = -b
    incidence = np.sign(b_line)
    b_bus = incidence.T @ b_line
    return SusceptanceMatrices(
        b_line=_frozen(b_line), b_bus=_frozen(b_bus),
        slack_index=net.slack_index, bus_ids=net.bus_ids,
        line_ids=tuple(ln.id for ln in lines),
    )


def _reduced_inverse(b_bus: np.ndarray, slack: int) -> np.ndarray:
    """inv(B_bus with slack row/col deleted), zero-filled back to full size."""
    n = b_bus.shape[0]
    keep = [i for i in range(n) if i != slack]
    reduced = b_bus[np.ix_(keep, keep)]
    try:
        inv = np.linalg.inv(reduced)
    except np.linalg.LinAlgError as exc:
        raise DisconnectedNetworkError("reduced susceptance matrix is singular") from exc
    full = np.zeros((n, n))
    full[np.ix_(keep, keep)] = inv
    return full


@dataclass(frozen=True, eq=False)
class PtdfMatrix:
    values: np.ndarray          # (n_L, n_B), slack column identically zero
    slack_index: int
    bus_ids: tuple[int, ...]
    line_ids: tuple[int, ...]

    def bus_column(self, bus_id: int) -> int:
        try:
            return self.bus_ids.index(bus_id)
        except ValueError:
            raise KeyError(f"no bus with id {bus_id}") from None


def ptdf(net: Network) -> PtdfMatrix:
    """PTDF = B_line * reduced-inverse(B_bus).  Requires a connected network."""
    _require_connected(net)
    sus = build_susceptance(net)
    values = sus.b_line @ _reduced_inverse(sus.b_bus, sus.slack_index)
    values[:, sus.slack_index] = 0.0
    return PtdfMatrix(values=_frozen(values), slack_index=sus.slack_index,
                      bus_ids=sus.bus_ids, line_ids=sus.line_ids)


@dataclass(frozen=True, eq=False)
class InjectionProfile:
    """Per-bus net injections (p.u., bus order).  Must sum to ~0."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if abs(float(p.sum())) > BALANCE_TOL:
            raise ValueError(f"injections must balance to 0, sum = {p.sum():.3e}")
        object.__setattr__(self, "p", _frozen(p.copy()))

    @classmethod
    def from_pairs(cls, net: Network, values: dict[int, float]) -> "InjectionProfile":
        p = np.zeros(net.n_bus)
        for bus_id, val in values.items():
            p[net.bus_index[bus_id]] += val
        return cls(p)


def dc_flow(net: Network, inj: InjectionProfile) -> np.ndarray:
    """Line flows (p.u., in-service line order) for a balanced injection."""
    mat = ptdf(net)
    if inj.p.shape != (net.n_bus,):
        raise ValueError(f"injection length {inj.p.shape[0]} != n_bus {net.n_bus}")
    return mat.values @ inj.p


@dataclass(frozen=True, eq=False)
class ControllabilityVector:
    """Per-line flow response to +1 p.u. at bus m withdrawn at bus n."""

    m: int
    n: int
    values: np.ndarray


def cv(mat: PtdfMatrix, m: int, n: int) -> ControllabilityVector:
    if m == n:
        raise ValueError(f"node pair must be distinct, got ({m}, {n})")
    col_m = mat.bus_column(m)
    col_n = mat.bus_column(n)
    return ControllabilityVector(
        m=m, n=n, values=_frozen(mat.values[:, col_m] - mat.values[:, col_n]))


def apply_hvdc(mat: PtdfMatrix, placements: list[tuple[int, int]],
               p_dc: np.ndarray) -> np.ndarray:
    """AC flow change (p.u.) from HVDC setpoints on the given node pairs."""
    p_dc = np.asarray(p_dc, dtype=float)
    if p_dc.shape != (len(placements),):
        raise ValueError(f"{len(placements)} placements but {p_dc.shape} setpoints")
    delta = np.zeros(mat.values.shape[0])
    for (m, n), setpoint in zip(placements, p_dc):
        delta += cv(mat, m, n).values * setpoint
    return delta


def tcsc_sensitivity(net: Network, inj: InjectionProfile, line_id: int) -> np.ndarray:
    """d(line flows)/d(reactance of ``line_id``), evaluated analytically.

    With theta = reduced-inverse(B_bus) @ p and w = theta_i - theta_j over the
    device line's terminals, the derivative collapses to
    (w / x^2) * (CV_ij - e_line).  The second term of the product rule carries
    a minus sign from d(inv(B)) = -inv(B) dB inv(B).
    """
    _require_connected(net)
    lines = net.lines_in_service
    row = next((k for k, ln in enumerate(lines) if ln.id == line_id), None)
    if row is None:
        raise KeyError(f"no in-service line with id {line_id}")
    ln = lines[row]
    sus = build_susceptance(net)
    theta = _reduced_inverse(sus.b_bus, sus.slack_index) @ inj.p
    w = theta[net.bus_index[ln.from_bus]] - theta[net.bus_index[ln.to_bus]]
    mat = ptdf(net)
    sens = (w / ln.reactance ** 2) * cv(mat, ln.from_bus, ln.to_bus).values
    sens[row] -= w / ln.reactance ** 2
    return sens


@dataclass(frozen=True, eq=False)
class LodfMatrix:
    """Column k: redistribution of line k's pre-outage flow; diagonal = -1.

    Bridge outages island the network: their columns are NaN and the line ids
    are listed in ``islanded``.
    """

    values: np.ndarray
    islanded: tuple[int, ...]
    line_ids: tuple[int, ...]


def remove_line(net: Network, line_id: int) -> Network:
    """Copy of the network with one line switched out of service."""
    if all(ln.id != line_id or not ln.in_service for ln in net.lines):
        raise KeyError(f"no in-service line with id {line_id}")
    return replace(net, lines=tuple(
        ln if ln.id != line_id else replace(ln, in_service=False) for ln in net.lines))


def is_bridge(net: Network, line_id: int) -> bool:
    """True when the line's outage would split the network."""
    return len(connected_components(remove_line(net, line_id))) > 1


def lodf(net: Network) -> LodfMatrix:
    _require_connected(net)
    mat = ptdf(net)
    lines = net.lines_in_service
    n_l = len(lines)
    values = np.zeros((n_l, n_l))
    islanded = []
    for k, ln in enumerate(lines):
        if is_bridge(net, ln.id):
            values[:, k] = np.nan
            islanded.append(ln.id)
            continue
        h = cv(mat, ln.from_bus, ln.to_bus).values
        denom = 1.0 - h[k]
        if abs(denom) < 1e-9:
            raise ArithmeticError(
                f"line {ln.id}: outage denominator {denom:.3e} is numerically singular")
        values[:, k] = h / denom
        values[k, k] = -1.0
    return LodfMatrix(values=_frozen(values), islanded=tuple(islanded),
                      line_ids=mat.line_ids)
