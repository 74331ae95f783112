"""Candidate pruning predicates.

All predicates are one-sided: they may only discard pairs that provably
cannot appear in any answer under the current threshold. Two families exist:

* keyword pruning: a query vertex's signature bits must be contained in a
  data vertex's signature (or in a tree node's aggregated signature) for any
  exact keyword containment to be possible;
* neighbor-difference pruning: cheap lower bounds on the neighbor difference
  of a pair. Any single pair's difference lower-bounds both the MAX and the
  SUM aggregate, so a pair with bound above sigma can never occur in an
  answer mapping regardless of the fold.

The tight bound counts how many of the query vertex's neighbors have their
keyword bits covered by the data vertex's neighborhood signature: an
uncovered query neighbor cannot be mapped to any neighbor of the data vertex,
so it contributes at least one to the difference. Node-level variants use a
node's aggregates, which cover every member's, making the node bound a lower
bound of every member's bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import QueryGraph
from .signatures import SignatureConfig, build_bit_vectors, containment_test

__all__ = [
    "QuerySideData",
    "build_query_side",
    "keyword_prune_vertex",
    "keyword_prune_node",
    "lb_nd_basic",
    "lb_nd_tight",
    "lb_nd_node",
    "nd_prune_vertex",
]


@dataclass(frozen=True)
class QuerySideData:
    """Signatures and degrees of one query graph, ready for batch checks.

    ``neighbor_rows`` stacks, for each query vertex in id order, the
    signatures of its neighbors; ``neighbor_offsets[j]:neighbor_offsets[j+1]``
    is query vertex ``j``'s slice.
    """

    cfg: SignatureConfig
    query: QueryGraph
    bv: np.ndarray  # (nq, groups, words)
    flat_bv: np.ndarray  # (nq, groups * words)
    degrees: np.ndarray  # (nq,)
    neighbor_rows: np.ndarray  # (sum degrees, groups * words)
    neighbor_offsets: np.ndarray  # (nq + 1,)

    @property
    def vertex_count(self) -> int:
        return self.bv.shape[0]

    def neighbor_flat(self, qj: int) -> np.ndarray:
        return self.neighbor_rows[self.neighbor_offsets[qj] : self.neighbor_offsets[qj + 1]]


def build_query_side(q: QueryGraph, cfg: SignatureConfig) -> QuerySideData:
    bv = build_bit_vectors(q.keywords, cfg)
    flat = bv.reshape(q.vertex_count, -1)
    degrees = np.array([len(q.adjacency[j]) for j in range(q.vertex_count)], dtype=np.int64)
    offsets = np.zeros(q.vertex_count + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    rows = np.zeros((int(offsets[-1]), flat.shape[1]), dtype=np.uint64)
    for j in range(q.vertex_count):
        for slot, ql in enumerate(q.adjacency[j]):
            rows[offsets[j] + slot] = flat[ql]
    return QuerySideData(
        cfg=cfg,
        query=q,
        bv=bv,
        flat_bv=flat,
        degrees=degrees,
        neighbor_rows=rows,
        neighbor_offsets=offsets,
    )


def keyword_prune_vertex(v_bv: np.ndarray, q_bv: np.ndarray) -> bool:
    """True when some group of the query's bits is not covered by the vertex."""
    return not containment_test(v_bv, q_bv)


def keyword_prune_node(node_agg_bv: np.ndarray, q_bv: np.ndarray) -> bool:
    """True when not even the node's aggregated bits cover the query's."""
    return not containment_test(node_agg_bv, q_bv)


def lb_nd_basic(q_degree: int, v_degree: int) -> int:
    """Degree shortfall bound: a vertex with too few neighbors must miss some."""
    return max(0, q_degree - v_degree)


def _covered_count(qside: QuerySideData, qj: int, nbv_flat: np.ndarray) -> int:
    rows = qside.neighbor_flat(qj)
    if rows.shape[0] == 0:
        return 0
    return int(np.all((rows & nbv_flat) == rows, axis=1).sum())


def lb_nd_tight(qside: QuerySideData, qj: int, v_nbv: np.ndarray) -> int:
    """Signature-coverage bound against one vertex's neighborhood bits."""
    flat = v_nbv.reshape(-1)
    return int(qside.degrees[qj]) - _covered_count(qside, qj, flat)


def lb_nd_node(qside: QuerySideData, qj: int, node_agg_nbv: np.ndarray) -> int:
    """Signature-coverage bound against a node's aggregated neighborhood bits.

    The aggregate ORs every member's neighborhood bits, so each coverage
    indicator here is at least the member's and the resulting bound is <= the
    minimum member bound.
    """
    flat = node_agg_nbv.reshape(-1)
    return int(qside.degrees[qj]) - _covered_count(qside, qj, flat)


def nd_prune_vertex(lower_bound: int, sigma: int) -> bool:
    """Discard when even a lower bound on the pair's difference exceeds sigma."""
    return lower_bound > sigma
