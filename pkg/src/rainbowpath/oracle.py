"""Exact decision procedures for rainbow Hamiltonian paths and cycles.

Exponential-time but exhaustive: depth-first search over vertex orders with
forest components forced contiguous, pruned by an exact edge-to-color
matchability test.  Used as ground truth against the constructive solver at
desk scale.  Budgets make exhaustion explicit: an over-budget call reports
Unknown, never a silent wrong answer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product

from .forest import RainbowLinearForest
from .model import (
    CycleCertificate,
    Edge,
    GraphCollection,
    InputError,
    PathCertificate,
    canonical_edge,
)

FOUND = "found"
NOT_FOUND = "not_found"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleBudget:
    """Caps on search effort; exceeding either yields Unknown."""

    node_limit: int = 5_000_000
    time_limit: float = 60.0

    def __post_init__(self) -> None:
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise InputError("budget limits must be positive")


@dataclass(frozen=True)
class OracleResult:
    status: str
    certificate: PathCertificate | CycleCertificate | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


class _BudgetExhausted(Exception):
    pass


class _SearchState:
    """Shared bookkeeping for the order-enumeration searches."""

    def __init__(self, collection: GraphCollection, reserved_colors: set[int],
                 budget: OracleBudget, match_check_interval: int) -> None:
        self.collection = collection
        self.reserved = reserved_colors
        self.budget = budget
        self.interval = max(1, match_check_interval)
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit
        # Union adjacency over colors that are free for non-forest edges.
        masks = [0] * collection.n_vertices
        for c in range(collection.n_colors):
            if c in reserved_colors:
                continue
            row = collection.adjacency[c]
            for v in range(collection.n_vertices):
                masks[v] |= row[v]
        self.free_union = masks

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise _BudgetExhausted
        if self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise _BudgetExhausted

    def admissible(self, edge: Edge) -> list[int]:
        return [c for c in self.collection.colors_with_edge(*edge) if c not in self.reserved]

    def matchable(self, edges: list[Edge]) -> dict[Edge, int] | None:
        """Exact rainbow-colorability of ``edges`` outside the reserved colors."""
        admissible = [self.admissible(e) for e in edges]
        owner: dict[int, int] = {}

        def augment(idx: int, visited: set[int]) -> bool:
            for color in admissible[idx]:
                if color in visited:
                    continue
                visited.add(color)
                if color not in owner or augment(owner[color], visited):
                    owner[color] = idx
                    return True
            return False

        for idx in range(len(edges)):
            if not augment(idx, set()):
                return None
        return {edges[idx]: color for color, idx in owner.items()}


def _forest_blocks(collection: GraphCollection, forest: RainbowLinearForest,
                   u: int, v: int) -> tuple[tuple[int, ...], tuple[int, ...], list[tuple[int, ...]]] | None:
    """Forced prefix (from u), forced suffix (into v), and middle components.

    None when no Hamiltonian u,v-path can contain the forest at all: an
    incompatible pair or a fixed color missing its edge.
    """
    from .forest import is_h_compatible

    if not is_h_compatible(forest, u, v):
        return None
    for edge, color in forest.fixed_colors.items():
        if not (0 <= color < collection.n_colors) or not collection.has_edge(color, *edge):
            return None
    comp_u = forest.component_of(u) or (u,)
    comp_v = forest.component_of(v) or (v,)
    prefix = comp_u if comp_u[0] == u else tuple(reversed(comp_u))
    suffix = comp_v if comp_v[-1] == v else tuple(reversed(comp_v))
    middles = [c for c in forest.components
               if len(c) > 1 and u not in c and v not in c]
    return prefix, suffix, sorted(middles, key=min)


def exact_rainbow_ham_path(
    collection: GraphCollection,
    u: int,
    v: int,
    forest: RainbowLinearForest | None = None,
    budget: OracleBudget = OracleBudget(),
    match_check_interval: int = 4,
) -> OracleResult:
    """Decide existence of a rainbow Hamiltonian u,v-path containing ``forest``.

    Forest edges keep their fixed colors and are forced contiguous; all other
    edges are matched to the remaining colors exactly.  Deterministic: the
    same input and budget always yield the same outcome and certificate.
    """
    collection.check_vertex(u)
    collection.check_vertex(v)
    if u == v:
        raise InputError("u and v must be distinct")
    forest = forest or RainbowLinearForest.empty()
    problems = forest.structure_violations()
    if problems:
        raise InputError("; ".join(problems))
    n = collection.n_vertices
    if n - 1 > collection.n_colors:
        return OracleResult(NOT_FOUND)
    blocks = _forest_blocks(collection, forest, u, v)
    if blocks is None:
        return OracleResult(NOT_FOUND)
    prefix_block, suffix_block, middles = blocks
    state = _SearchState(collection, forest.colors(), budget, match_check_interval)

    placed = set(prefix_block) | set(suffix_block)
    free_vertices = [x for x in range(n) if x not in placed and forest.degree_of(x) == 0]
    # Middle components enter the order as rigid two-ended segments.
    segment_ends = [(comp[0], comp[-1]) for comp in middles]

    prefix = list(prefix_block)
    suffix_rev = list(reversed(suffix_block))  # path tail stored reversed
    chosen: list[Edge] = []
    free_left = set(free_vertices)
    segs_left = set(range(len(middles)))

    def extension_ok(a: int, b: int) -> bool:
        return bool(state.free_union[a] >> b & 1)

    def candidates(end: int) -> list[tuple[str, int, int]]:
        out: list[tuple[str, int, int]] = []
        for x in sorted(free_left):
            if extension_ok(end, x):
                out.append(("v", x, 0))
        for idx in sorted(segs_left):
            e0, e1 = segment_ends[idx]
            if extension_ok(end, e0):
                out.append(("s", idx, 0))
            if e1 != e0 and extension_ok(end, e1):
                out.append(("s", idx, 1))
        return out

    def close_up() -> dict[Edge, int] | None:
        edge = canonical_edge(prefix[-1], suffix_rev[-1])
        if not extension_ok(prefix[-1], suffix_rev[-1]):
            return None
        return state.matchable(chosen + [edge])

    def dfs() -> dict[Edge, int] | None:
        state.tick()
        if not free_left and not segs_left:
            return close_up()
        if len(chosen) % state.interval == 0 and chosen:
            if state.matchable(chosen) is None:
                return None
        front = candidates(prefix[-1])
        back = candidates(suffix_rev[-1])
        if not front or not back:
            return None
        # Fail-first: extend whichever path end has fewer continuations.
        use_front = len(front) <= len(back)
        end_list = prefix if use_front else suffix_rev
        for kind, ident, orient in front if use_front else back:
            if kind == "v":
                added = [ident]
                free_left.discard(ident)
            else:
                comp = middles[ident]
                added = list(comp if orient == 0 else reversed(comp))
                segs_left.discard(ident)
            edge = canonical_edge(end_list[-1], added[0])
            end_list.extend(added)
            chosen.append(edge)
            result = dfs()
            if result is not None:
                return result
            chosen.pop()
            del end_list[-len(added):]
            if kind == "v":
                free_left.add(ident)
            else:
                segs_left.add(ident)
        return None

    try:
        assignment = dfs()
    except _BudgetExhausted:
        return OracleResult(UNKNOWN, nodes=state.nodes)
    if assignment is None:
        return OracleResult(NOT_FOUND, nodes=state.nodes)
    order = tuple(prefix + list(reversed(suffix_rev)))
    full = dict(forest.fixed_colors)
    full.update(assignment)
    coloring = tuple(full[canonical_edge(order[i], order[i + 1])] for i in range(n - 1))
    cert = PathCertificate(order, coloring)
    return OracleResult(FOUND, cert, state.nodes)


def exact_rainbow_ham_cycle(
    collection: GraphCollection,
    budget: OracleBudget = OracleBudget(),
    match_check_interval: int = 4,
) -> OracleResult:
    """Decide existence of a rainbow Hamiltonian cycle (n edges, distinct colors)."""
    n = collection.n_vertices
    if collection.n_colors < n:
        raise InputError(f"cycle oracle needs m >= n, got m={collection.n_colors}, n={n}")
    if n < 3:
        return OracleResult(NOT_FOUND)
    state = _SearchState(collection, set(), budget, match_check_interval)
    path = [0]
    chosen: list[Edge] = []
    left = set(range(1, n))

    def dfs() -> dict[Edge, int] | None:
        state.tick()
        if not left:
            if path[1] > path[-1]:  # each cycle visited once per direction
                return None
            if not state.free_union[path[-1]] >> 0 & 1:
                return None
            return state.matchable(chosen + [canonical_edge(path[-1], 0)])
        if len(chosen) % state.interval == 0 and chosen:
            if state.matchable(chosen) is None:
                return None
        end = path[-1]
        for x in sorted(left):
            if not state.free_union[end] >> x & 1:
                continue
            left.discard(x)
            path.append(x)
            chosen.append(canonical_edge(end, x))
            result = dfs()
            if result is not None:
                return result
            chosen.pop()
            path.pop()
            left.add(x)
        return None

    try:
        assignment = dfs()
    except _BudgetExhausted:
        return OracleResult(UNKNOWN, nodes=state.nodes)
    if assignment is None:
        return OracleResult(NOT_FOUND, nodes=state.nodes)
    order = tuple(path)
    coloring = tuple(
        assignment[canonical_edge(order[i], order[(i + 1) % n])] for i in range(n)
    )
    return OracleResult(FOUND, CycleCertificate(order, coloring), state.nodes)


ENUMERATION_VERTEX_BOUND = 5


def enumerate_collections(n: int, per_color_edge_predicate, visitor) -> int:
    """Visit every n-color collection on n vertices whose colors pass the predicate.

    ``per_color_edge_predicate(n, edges)`` filters candidate color graphs
    (None admits all); ``visitor(collection)`` may return False to abort
    early.  Returns the number of collections visited.  Refuses n above
    ENUMERATION_VERTEX_BOUND: the full space grows doubly exponentially.
    """
    if n < 1 or n > ENUMERATION_VERTEX_BOUND:
        raise InputError(
            f"exhaustive enumeration is limited to 1 <= n <= {ENUMERATION_VERTEX_BOUND}"
        )
    all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    candidates: list[tuple[tuple[int, ...], tuple[Edge, ...]]] = []
    for picks in range(1 << len(all_pairs)):
        edges = tuple(all_pairs[i] for i in range(len(all_pairs)) if picks >> i & 1)
        if per_color_edge_predicate is not None and not per_color_edge_predicate(n, edges):
            continue
        masks = [0] * n
        for a, b in edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        candidates.append((tuple(masks), edges))
    visited = 0
    for combo in product(range(len(candidates)), repeat=n):
        collection = GraphCollection(n, tuple(candidates[i][0] for i in combo))
        visited += 1
        if visitor(collection) is False:
            break
    return visited
