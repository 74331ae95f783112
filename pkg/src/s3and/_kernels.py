"""Compiled tree-traversal kernel.

The tree walk performs a few uint64 word comparisons per node but the
node-at-a-time python path pays interpreter and numpy dispatch overhead for
every one of them; past a few thousand vertices that overhead dominates
query time. This module flattens a built tree into plain arrays once and
walks it in a numba-compiled kernel instead.

The kernel mirrors the python traversal exactly: a child inherits its
parent's live query vertices minus those its aggregates rule out, leaves run
the per-member checks, and the same (node, live set) pairs are processed, so
candidates and the visit count are identical (traversal order cannot matter
because the frontier is always fully drained). Unit tests assert that
equality on randomized instances. When numba is unavailable the engine uses
the python path and everything still works.

Live sets ride in one uint64 bitmask, so the fast path covers queries of up
to 64 vertices; larger queries fall back to the python path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

__all__ = ["AVAILABLE", "MAX_FAST_QUERY", "FlatTree", "flatten_index", "collect_fast", "ensure_ready"]

MAX_FAST_QUERY = 64


@dataclass(frozen=True)
class FlatTree:
    """A tree re-expressed as preorder arrays for the kernel.

    ``kind[i]`` is 1 for a leaf. Children and members live in CSR layout:
    node ``i`` owns ``child_ids[child_ptr[i]:child_ptr[i+1]]`` and
    ``member_ids[member_ptr[i]:member_ptr[i+1]]``. Aggregate signatures are
    flattened to one row of words per node.
    """

    kind: np.ndarray
    child_ptr: np.ndarray
    child_ids: np.ndarray
    member_ptr: np.ndarray
    member_ids: np.ndarray
    agg_bv: np.ndarray
    agg_nbv: np.ndarray


def flatten_index(index) -> FlatTree:
    nodes = [n for n, _ in index.iter_nodes()]
    order = {id(n): i for i, n in enumerate(nodes)}
    count = len(nodes)
    words = index.sig_config.group_count * index.sig_config.words_per_group
    kind = np.zeros(count, dtype=np.uint8)
    child_ptr = np.zeros(count + 1, dtype=np.int64)
    member_ptr = np.zeros(count + 1, dtype=np.int64)
    child_ids: list[int] = []
    member_chunks: list[np.ndarray] = []
    member_total = 0
    agg_bv = np.empty((count, words), dtype=np.uint64)
    agg_nbv = np.empty((count, words), dtype=np.uint64)
    for i, node in enumerate(nodes):
        agg_bv[i] = node.agg_bv.reshape(-1)
        agg_nbv[i] = node.agg_nbv.reshape(-1)
        if node.is_leaf:
            kind[i] = 1
            chunk = np.asarray(node.members, dtype=np.int64)
            member_chunks.append(chunk)
            member_total += chunk.size
        else:
            child_ids.extend(order[id(c)] for c in node.children)
        child_ptr[i + 1] = len(child_ids)
        member_ptr[i + 1] = member_total
    members = (
        np.concatenate(member_chunks)
        if member_chunks
        else np.empty(0, dtype=np.int64)
    )
    return FlatTree(
        kind=kind,
        child_ptr=child_ptr,
        child_ids=np.asarray(child_ids, dtype=np.int64),
        member_ptr=member_ptr,
        member_ids=members,
        agg_bv=agg_bv,
        agg_nbv=agg_nbv,
    )


@njit(cache=True)
def _traverse(
    kind,
    child_ptr,
    child_ids,
    member_ptr,
    member_ids,
    agg_bv,
    agg_nbv,
    bv,
    nbv,
    deg,
    q_bv,
    q_deg,
    qn_ptr,
    qn_bv,
    sigma,
    use_basic,
    use_tight,
    out_counts,
    out_cands,
):
    n_nodes = kind.shape[0]
    nq = q_bv.shape[0]
    words = q_bv.shape[1]
    one = np.uint64(1)
    zero = np.uint64(0)
    full = zero
    for qj in range(nq):
        full |= one << np.uint64(qj)
    node_stack = np.empty(n_nodes, dtype=np.int64)
    mask_stack = np.empty(n_nodes, dtype=np.uint64)
    node_stack[0] = 0
    mask_stack[0] = full
    sp = 1
    visited = 0
    while sp > 0:
        sp -= 1
        u = node_stack[sp]
        mask = mask_stack[sp]
        visited += 1
        if kind[u] == 1:
            for mi in range(member_ptr[u], member_ptr[u + 1]):
                v = member_ids[mi]
                for qj in range(nq):
                    if (mask >> np.uint64(qj)) & one == zero:
                        continue
                    ok = True
                    for w in range(words):
                        if (bv[v, w] & q_bv[qj, w]) != q_bv[qj, w]:
                            ok = False
                            break
                    if not ok:
                        continue
                    if use_basic and q_deg[qj] - deg[v] > sigma:
                        continue
                    if use_tight and qn_ptr[qj + 1] > qn_ptr[qj]:
                        covered = 0
                        for r in range(qn_ptr[qj], qn_ptr[qj + 1]):
                            inside = True
                            for w in range(words):
                                if (nbv[v, w] & qn_bv[r, w]) != qn_bv[r, w]:
                                    inside = False
                                    break
                            if inside:
                                covered += 1
                        if q_deg[qj] - covered > sigma:
                            continue
                    out_cands[qj, out_counts[qj]] = v
                    out_counts[qj] += 1
        else:
            for ci in range(child_ptr[u], child_ptr[u + 1]):
                c = child_ids[ci]
                newmask = zero
                for qj in range(nq):
                    if (mask >> np.uint64(qj)) & one == zero:
                        continue
                    ok = True
                    for w in range(words):
                        if (agg_bv[c, w] & q_bv[qj, w]) != q_bv[qj, w]:
                            ok = False
                            break
                    if not ok:
                        continue
                    if use_tight and qn_ptr[qj + 1] > qn_ptr[qj]:
                        covered = 0
                        for r in range(qn_ptr[qj], qn_ptr[qj + 1]):
                            inside = True
                            for w in range(words):
                                if (agg_nbv[c, w] & qn_bv[r, w]) != qn_bv[r, w]:
                                    inside = False
                                    break
                            if inside:
                                covered += 1
                        if q_deg[qj] - covered > sigma:
                            continue
                    newmask |= one << np.uint64(qj)
                if newmask != zero:
                    node_stack[sp] = c
                    mask_stack[sp] = newmask
                    sp += 1
    return visited


_ready = False


def ensure_ready() -> None:
    """Compile (or load the cached build of) the kernel on a dummy tree."""
    global _ready
    if _ready or not AVAILABLE:
        return
    words = 1
    _traverse(
        np.ones(1, dtype=np.uint8),
        np.zeros(2, dtype=np.int64),
        np.empty(0, dtype=np.int64),
        np.array([0, 1], dtype=np.int64),
        np.zeros(1, dtype=np.int64),
        np.zeros((1, words), dtype=np.uint64),
        np.zeros((1, words), dtype=np.uint64),
        np.zeros((1, words), dtype=np.uint64),
        np.zeros((1, words), dtype=np.uint64),
        np.zeros(1, dtype=np.int64),
        np.zeros((1, words), dtype=np.uint64),
        np.zeros(1, dtype=np.int64),
        np.zeros(2, dtype=np.int64),
        np.empty((0, words), dtype=np.uint64),
        0,
        True,
        True,
        np.zeros(1, dtype=np.int64),
        np.empty((1, 1), dtype=np.int64),
    )
    _ready = True


def collect_fast(index, qside, sigma, degrees, ablation):
    """Kernel-backed equivalent of the python candidate collection."""
    ensure_ready()
    flat = index.fast_tree
    if flat is None:
        flat = flatten_index(index)
        index.fast_tree = flat
    nq = qside.vertex_count
    out_counts = np.zeros(nq, dtype=np.int64)
    out_cands = np.empty((nq, index.vertex_count), dtype=np.int64)
    visited = _traverse(
        flat.kind,
        flat.child_ptr,
        flat.child_ids,
        flat.member_ptr,
        flat.member_ids,
        flat.agg_bv,
        flat.agg_nbv,
        index.aux.flat_bv(),
        index.aux.flat_nbv(),
        degrees,
        qside.flat_bv,
        qside.degrees,
        qside.neighbor_offsets,
        qside.neighbor_rows,
        int(sigma),
        bool(ablation.lb_basic),
        bool(ablation.lb_tight),
        out_counts,
        out_cands,
    )
    candidates = [
        np.sort(out_cands[qj, : out_counts[qj]].copy()) for qj in range(nq)
    ]
    return candidates, int(visited)
