"""Index-backed query execution.

The pipeline is: traverse the signature tree collecting per-query-vertex
candidate vertices (everything the pruning predicates cannot rule out), then
recheck candidates against exact keyword sets, order query vertices into a
connected plan, and backtrack over the plan to enumerate answer mappings.

Traversal maintains, per tree node, the subset of query vertices the node is
still live for. A child inherits its parent's live set minus the query
vertices its own aggregates rule out; a node with an empty live set is never
visited. Visit order is a max-heap on the node's maximum neighbor keyword
count by default. Order is a heuristic only: the candidate sets, and
therefore the answers, are identical under any order, and ``traversal`` can
be set to ``"fifo"`` or ``"lifo"`` to check exactly that.
"""

from __future__ import annotations

import collections
import heapq
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import DataGraph, QueryGraph
from .index import SubgraphIndex
from .pruning import QuerySideData, build_query_side
from .semantics import (
    AggregateKind,
    MatchAnswer,
    QuerySpec,
    aggregated_neighbor_difference,
    is_answer,
    keyword_feasible,
    sort_answers,
)

__all__ = [
    "Ablation",
    "QueryStats",
    "QueryResult",
    "collect_candidates",
    "exact_keyword_filter",
    "make_query_plan",
    "refine",
    "run_query",
]


@dataclass(frozen=True)
class Ablation:
    """Which pruning predicates participate in candidate collection.

    ``keyword`` is the signature containment check (vertex and node level),
    ``lb_basic`` the degree-shortfall bound, ``lb_tight`` the
    neighborhood-signature bound (vertex and node level). Keyword pruning is
    always on; the other two stack on top of it.
    """

    lb_basic: bool = True
    lb_tight: bool = True

    LEVELS = ("ks", "ks+lb", "ks+lb+tight")

    @classmethod
    def parse(cls, name: str) -> "Ablation":
        low = name.strip().lower()
        if low == "ks":
            return cls(lb_basic=False, lb_tight=False)
        if low == "ks+lb":
            return cls(lb_basic=True, lb_tight=False)
        if low == "ks+lb+tight":
            return cls(lb_basic=True, lb_tight=True)
        raise ValueError(f"unknown ablation {name!r}, expected one of {cls.LEVELS}")

    @property
    def name(self) -> str:
        if self.lb_tight:
            return "ks+lb+tight"
        return "ks+lb" if self.lb_basic else "ks"


@dataclass
class QueryStats:
    """Measurements of one query run, serializable for the CLI's stats JSON."""

    pruning_power: float
    nodes_visited: int
    candidates_per_qvertex: list[int]
    wall_ms: float
    answers: int
    distinct_vertex_sets: int

    def to_dict(self) -> dict:
        return {
            "pruning_power": self.pruning_power,
            "nodes_visited": self.nodes_visited,
            "candidates_per_qvertex": self.candidates_per_qvertex,
            "wall_ms": self.wall_ms,
            "answers": self.answers,
            "distinct_vertex_sets": self.distinct_vertex_sets,
        }


@dataclass
class QueryResult:
    answers: list[MatchAnswer]
    stats: QueryStats
    candidates: list[np.ndarray] = field(default_factory=list)


def _node_live(
    node, qside: QuerySideData, live: np.ndarray, sigma: int, ablation: Ablation
) -> np.ndarray:
    """Subset of ``live`` query vertices the node's aggregates cannot rule out."""
    bv_flat = node.agg_bv.reshape(-1)
    qv = qside.flat_bv[live]
    ok = np.all((bv_flat[None, :] & qv) == qv, axis=1)
    if ablation.lb_tight and ok.any():
        nbv_flat = node.agg_nbv.reshape(-1)
        for pos, qj in enumerate(live):
            if not ok[pos]:
                continue
            rows = qside.neighbor_flat(int(qj))
            if rows.shape[0] == 0:
                continue
            covered = int(np.all((rows & nbv_flat[None, :]) == rows, axis=1).sum())
            if int(qside.degrees[qj]) - covered > sigma:
                ok[pos] = False
    return live[ok]


def _leaf_survivors(
    members_bv: np.ndarray,
    members_nbv: np.ndarray,
    members_deg: np.ndarray,
    qside: QuerySideData,
    live: np.ndarray,
    sigma: int,
    ablation: Ablation,
) -> np.ndarray:
    """Boolean matrix (member, live query vertex) of pairs surviving all checks."""
    qv = qside.flat_bv[live]
    keep = np.all(
        (members_bv[:, None, :] & qv[None, :, :]) == qv[None, :, :], axis=2
    )
    if ablation.lb_basic:
        keep &= (qside.degrees[live][None, :] - members_deg[:, None]) <= sigma
    if ablation.lb_tight:
        for pos, qj in enumerate(live):
            if not keep[:, pos].any():
                continue
            rows = qside.neighbor_flat(int(qj))
            if rows.shape[0] == 0:
                continue
            cov = np.all(
                (members_nbv[:, None, :] & rows[None, :, :]) == rows[None, :, :],
                axis=2,
            )
            lb = int(qside.degrees[qj]) - cov.sum(axis=1)
            keep[:, pos] &= lb <= sigma
    return keep


class _Frontier:
    """Pending (node, live set) entries in heap, FIFO, or LIFO order.

    The heap is a max-heap on the node's maximum neighbor keyword count with
    an insertion counter as tie-break, so every order is deterministic.
    """

    def __init__(self, traversal: str) -> None:
        if traversal not in ("heap", "fifo", "lifo"):
            raise ValueError(f"unknown traversal {traversal!r}")
        self.traversal = traversal
        self._heap: list[tuple[int, int, object, np.ndarray]] = []
        self._queue: collections.deque = collections.deque()
        self._seq = 0

    def push(self, node, live: np.ndarray) -> None:
        if self.traversal == "heap":
            self._seq += 1
            heapq.heappush(self._heap, (-node.nk_max, self._seq, node, live))
        else:
            self._queue.append((node, live))

    def pop(self):
        if self.traversal == "heap":
            entry = heapq.heappop(self._heap)
            return entry[2], entry[3]
        if self.traversal == "fifo":
            return self._queue.popleft()
        return self._queue.pop()

    def __bool__(self) -> bool:
        return bool(self._heap) or bool(self._queue)


def collect_candidates(
    index: SubgraphIndex,
    qside: QuerySideData,
    sigma: int,
    degrees: np.ndarray,
    ablation: Ablation = Ablation(),
    traversal: str = "heap",
    compiled: bool | None = None,
) -> tuple[list[np.ndarray], int]:
    """Traverse the tree, returning candidate vertex ids per query vertex.

    ``degrees`` is the data graph's degree vector, needed by the degree
    bound. Returns ``(candidates, nodes_visited)``; candidate arrays are
    sorted ascending so the result is independent of traversal order.

    ``compiled=None`` routes the default heap traversal through the numba
    kernel when possible; the kernel drains the same frontier and returns
    identical candidates and visit counts. ``compiled=False`` forces the
    python path, ``compiled=True`` demands the kernel.
    """
    nq = qside.vertex_count
    can_compile = (
        _kernels.AVAILABLE and traversal == "heap" and nq <= _kernels.MAX_FAST_QUERY
    )
    if compiled is None:
        compiled = can_compile
    if compiled:
        if not can_compile:
            raise ValueError(
                "compiled traversal needs numba, heap order, and a query of "
                f"at most {_kernels.MAX_FAST_QUERY} vertices"
            )
        return _kernels.collect_fast(index, qside, sigma, degrees, ablation)
    flat_bv = index.aux.flat_bv()
    flat_nbv = index.aux.flat_nbv()
    buckets: list[list[np.ndarray]] = [[] for _ in range(nq)]
    frontier = _Frontier(traversal)
    frontier.push(index.root, np.arange(nq, dtype=np.int64))
    visited = 0
    while frontier:
        node, live = frontier.pop()
        visited += 1
        if node.is_leaf:
            members = node.members
            keep = _leaf_survivors(
                flat_bv[members],
                flat_nbv[members],
                degrees[members],
                qside,
                live,
                sigma,
                ablation,
            )
            for pos, qj in enumerate(live):
                hits = members[keep[:, pos]]
                if hits.size:
                    buckets[int(qj)].append(hits)
        else:
            for child in node.children:
                child_live = _node_live(child, qside, live, sigma, ablation)
                if child_live.size:
                    frontier.push(child, child_live)
    candidates = [
        np.sort(np.concatenate(b)) if b else np.empty(0, dtype=np.int64)
        for b in buckets
    ]
    return candidates, visited


def exact_keyword_filter(
    g: DataGraph, q: QueryGraph, candidates: Sequence[np.ndarray]
) -> list[np.ndarray]:
    """Drop hash-collision survivors: keep only exact keyword containment."""
    out = []
    for qj, cand in enumerate(candidates):
        out.append(
            np.array(
                [v for v in cand.tolist() if keyword_feasible(g, q, qj, v)],
                dtype=np.int64,
            )
        )
    return out


def make_query_plan(
    q: QueryGraph, candidates: Sequence[Sequence[int]], prefer_small: bool = True
) -> list[int]:
    """Order query vertices for backtracking.

    Starts from the vertex with the fewest candidates and repeatedly appends
    a neighbor of the plan so far, again favoring few candidates (ties to the
    lowest id), so every prefix of the plan is connected in the query.
    ``prefer_small=False`` inverts the size preference; any connected order
    yields the same answers, so the flag exists for order-invariance checks.
    """
    nq = q.vertex_count
    sizes = [len(c) for c in candidates]
    sign = 1 if prefer_small else -1
    first = min(range(nq), key=lambda j: (sign * sizes[j], j))
    plan = [first]
    chosen = {first}
    while len(plan) < nq:
        frontier = {ql for j in plan for ql in q.adjacency[j]} - chosen
        if not frontier:
            raise ValueError("query graph is not connected")
        nxt = min(frontier, key=lambda j: (sign * sizes[j], j))
        plan.append(nxt)
        chosen.add(nxt)
    return plan


def refine(
    g: DataGraph,
    q: QueryGraph,
    plan: Sequence[int],
    candidates: Sequence[Sequence[int]],
    aggregate: AggregateKind,
    sigma: int,
    look_ahead: bool = True,
) -> list[MatchAnswer]:
    """Backtrack over the plan and keep every mapping passing the full predicate.

    The look-ahead skips a candidate that is adjacent neither to an already
    mapped vertex nor to any candidate of a later plan position: such a
    vertex would end up isolated in the induced image, so skipping it can
    never lose an answer. Single-vertex queries skip the look-ahead since a
    lone vertex is trivially connected.
    """
    nq = q.vertex_count
    cand_lists = [sorted(int(v) for v in c) for c in candidates]
    cand_sets = [set(c) for c in cand_lists]
    if any(not c for c in cand_lists):
        return []
    mapping = [-1] * nq
    used: set[int] = set()
    answers: list[MatchAnswer] = []

    def connectable(v: int, dep: int) -> bool:
        adj = g.adjacency_sets[v]
        if any(m in adj for m in used):
            return True
        for later in plan[dep + 1 :]:
            if not adj.isdisjoint(cand_sets[later]):
                return True
        return False

    def dfs(dep: int) -> None:
        if dep == nq:
            full = tuple(mapping)
            if is_answer(g, q, full, aggregate, sigma):
                answers.append(
                    MatchAnswer(
                        mapping=full,
                        vertex_set=frozenset(full),
                        and_score=aggregated_neighbor_difference(g, q, full, aggregate),
                    )
                )
            return
        qj = plan[dep]
        for v in cand_lists[qj]:
            if v in used:
                continue
            if look_ahead and nq > 1 and not connectable(v, dep):
                continue
            mapping[qj] = v
            used.add(v)
            dfs(dep + 1)
            used.discard(v)
            mapping[qj] = -1

    dfs(0)
    return sort_answers(answers)


def run_query(
    index: SubgraphIndex,
    g: DataGraph,
    spec: QuerySpec,
    ablation: Ablation = Ablation(),
    traversal: str = "heap",
    plan: Sequence[int] | None = None,
    look_ahead: bool = True,
    compiled: bool | None = None,
) -> QueryResult:
    """Full pipeline: traverse, recheck keywords, plan, refine, measure.

    One-time costs that are not part of answering this query (kernel
    compilation, the flattened tree) are paid before the clock starts.
    """
    if g.vertex_count != index.vertex_count:
        raise ValueError(
            f"index covers {index.vertex_count} vertices, graph has {g.vertex_count}"
        )
    if tuple(g.keyword_names) != tuple(index.keyword_names):
        raise ValueError("index was built over a different keyword table")
    if compiled is not False and _kernels.AVAILABLE and traversal == "heap":
        _kernels.ensure_ready()
        if index.fast_tree is None:
            index.fast_tree = _kernels.flatten_index(index)
    degrees = g.degree_vector
    t0 = time.perf_counter()
    q = spec.query
    qside = build_query_side(q, index.sig_config)
    raw, visited = collect_candidates(
        index, qside, spec.sigma, degrees, ablation, traversal, compiled
    )
    candidates = exact_keyword_filter(g, q, raw)
    sizes = [len(c) for c in candidates]
    total_pairs = g.vertex_count * q.vertex_count
    power = 1.0 - (sum(sizes) / total_pairs) if total_pairs else 0.0
    if plan is None:
        plan = make_query_plan(q, candidates)
    else:
        plan = list(plan)
        if sorted(plan) != list(range(q.vertex_count)):
            raise ValueError("plan must order every query vertex exactly once")
    if all(sizes):
        answers = refine(
            g, q, plan, candidates, spec.aggregate, spec.sigma, look_ahead
        )
    else:
        answers = []
    wall_ms = (time.perf_counter() - t0) * 1000.0
    stats = QueryStats(
        pruning_power=power,
        nodes_visited=visited,
        candidates_per_qvertex=sizes,
        wall_ms=wall_ms,
        answers=len(answers),
        distinct_vertex_sets=len({a.vertex_set for a in answers}),
    )
    return QueryResult(answers=answers, stats=stats, candidates=candidates)
