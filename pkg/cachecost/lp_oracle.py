"""
Vertex-enumeration oracle for the reduced placement LP.

The LP maximizes sum_t t/(t+1) y_t subject to sum_t q_t y_t <= 1,
sum_t y_t <= 1 and y >= 0. With only two non-trivial constraints every
vertex has at most two non-zero coordinates, so the vertex set is the
origin, one point per type and one intersection per pair of types. An
optimum lies on a vertex, so exhaustive enumeration is an exact solver and
an independent check of the closed form.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple

from cachecost.closed_form import (
    OptimalSolution,
    RegimeTag,
    build_solution,
    classify_regime,
)
from cachecost.config import config as settings
from cachecost.errors import RegimeError
from cachecost.model import SystemConfig, TypeAllocation, constraint_coefficients, objective_weights

logger = logging.getLogger(__name__)


class VertexKind(str, Enum):
    ORIGIN = "Origin"
    SINGLE_TYPE = "SingleType"
    PAIR_INTERSECTION = "PairIntersection"


class Binding(str, Enum):
    """Which constraint defines a vertex."""
    NONE = "none"
    COST = "cost"
    SUM = "sum"
    BOTH = "both"


@dataclass(frozen=True)
class Vertex:
    """A candidate corner point of the reduced LP."""
    kind: VertexKind
    types: Tuple[int, ...]
    values: Tuple[float, ...]
    objective: float
    feasible: bool
    binding: Binding = Binding.NONE

    @property
    def top_type(self) -> int:
        return max(self.types, default=0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "types": list(self.types),
            "values": list(self.values),
            "objective": self.objective,
            "feasible": self.feasible,
            "binding": self.binding.value,
        }


@dataclass(frozen=True)
class ClaimsReport:
    """Outcome of the corner-point claims for an ArchitectureLimited configuration."""
    a: int
    b: int
    best_partner_is_b: bool
    best_partner_is_a: bool
    pair_beats_single_a: bool

    @property
    def all_hold(self) -> bool:
        return self.best_partner_is_b and self.best_partner_is_a and self.pair_beats_single_a

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a,
            "b": self.b,
            "best_partner_is_b": self.best_partner_is_b,
            "best_partner_is_a": self.best_partner_is_a,
            "pair_beats_single_a": self.pair_beats_single_a,
            "all_hold": self.all_hold,
        }


def _single_vertex(t: int, q_t: float, weight: float) -> Vertex:
    tol = settings.TOLERANCE
    if q_t > 1 + tol:
        binding = Binding.COST
    elif q_t < 1 - tol:
        binding = Binding.SUM
    else:
        binding = Binding.BOTH
    y = min(1.0, 1.0 / q_t)
    return Vertex(VertexKind.SINGLE_TYPE, (t,), (y,), weight * y, True, binding)


def _pair_vertex(i: int, j: int, q_i: float, q_j: float, w_i: float, w_j: float) -> Vertex:
    gap = q_j - q_i
    if abs(gap) <= settings.SUM_TOLERANCE:
        # Parallel constraints: no unique intersection with both types present
        return Vertex(VertexKind.PAIR_INTERSECTION, (i, j), (0.0, 0.0), 0.0, False, Binding.BOTH)
    y_i = (q_j - 1.0) / gap
    y_j = (1.0 - q_i) / gap
    feasible = y_i > 0 and y_j > 0
    return Vertex(VertexKind.PAIR_INTERSECTION, (i, j), (y_i, y_j), w_i * y_i + w_j * y_j, feasible, Binding.BOTH)


def enumerate_vertices(config: SystemConfig) -> List[Vertex]:
    """Origin, K single-type vertices and all C(K, 2) pair intersections, with feasibility flags."""
    K = config.users
    q = constraint_coefficients(config)
    w = objective_weights(K)
    vertices = [Vertex(VertexKind.ORIGIN, (), (), 0.0, True)]
    vertices.extend(_single_vertex(t, float(q[t - 1]), w[t]) for t in range(1, K + 1))
    for i in range(1, K + 1):
        for j in range(i + 1, K + 1):
            vertices.append(_pair_vertex(i, j, float(q[i - 1]), float(q[j - 1]), w[i], w[j]))
    return vertices


def best_vertex(vertices: List[Vertex]) -> Vertex:
    """
    Feasible vertex with the largest objective.

    Objectives equal up to float noise are ties; they go to the vertex with the
    larger coded type, then to the one with fewer types.
    """
    feasible = [v for v in vertices if v.feasible]
    top = max(v.objective for v in feasible)
    tied = [v for v in feasible if v.objective >= top - settings.SUM_TOLERANCE]
    return max(tied, key=lambda v: (v.top_type, -len(v.types)))


def vertex_allocation(users: int, vertex: Vertex) -> TypeAllocation:
    return TypeAllocation.from_coded(users, dict(zip(vertex.types, vertex.values)))


def oracle_solve(config: SystemConfig) -> OptimalSolution:
    """Optimal solution by exhaustive search over the LP vertices."""
    vertex = best_vertex(enumerate_vertices(config))
    logger.debug(f"oracle K={config.users} rho={config.rho} alpha={config.alpha}: "
                 f"{vertex.kind.value}{vertex.types} objective={vertex.objective}")
    allocation = vertex_allocation(config.users, vertex)
    return build_solution(config, allocation, classify_regime(config))


def check_claims(config: SystemConfig) -> ClaimsReport:
    """
    Check the corner-point claims by enumeration.

    For pair intersections (i, j) with i <= a < b <= j: with i fixed the best
    partner is j = b; with j fixed the best partner is i = a; and the
    intersection (a, b) beats caching all of type a.
    """
    regime = classify_regime(config)
    if regime.tag is not RegimeTag.ARCHITECTURE_LIMITED:
        raise RegimeError(f"claims apply to ArchitectureLimited configurations, got {regime.tag.value}")
    a, b, K = regime.a, regime.b, config.users
    tol = settings.TOLERANCE
    pairs = {v.types: v for v in enumerate_vertices(config)
             if v.kind is VertexKind.PAIR_INTERSECTION and v.feasible}
    if float(constraint_coefficients(config)[a - 1]) >= 1.0 - tol:
        # q_a on the boundary: every (a, j) intersection collapses to y_a = 1
        w_a = objective_weights(K)[a]
        for j in range(b, K + 1):
            pairs[(a, j)] = Vertex(VertexKind.PAIR_INTERSECTION, (a, j), (1.0, 0.0), w_a, True, Binding.BOTH)

    def best_is(candidates: List[Vertex], slot: int, expected: int) -> bool:
        if not candidates:
            return True
        top = max(v.objective for v in candidates)
        winners = {v.types[slot] for v in candidates if v.objective >= top - tol}
        return expected in winners

    partner_b = all(
        best_is([pairs[(i, j)] for j in range(b, K + 1) if (i, j) in pairs], 1, b)
        for i in range(1, a + 1)
    )
    partner_a = all(
        best_is([pairs[(i, j)] for i in range(1, a + 1) if (i, j) in pairs], 0, a)
        for j in range(b, K + 1)
    )

    single_a = a / (a + 1)
    corner = pairs.get((a, b))
    if corner is not None and corner.values[1] > tol:
        beats = corner.objective > single_a
    else:
        beats = corner is None or abs(corner.objective - single_a) <= tol
    return ClaimsReport(a=a, b=b, best_partner_is_b=partner_b, best_partner_is_a=partner_a,
                        pair_beats_single_a=beats)
