"""Balanced signature tree over the data graph.

Vertices are recursively partitioned by similarity of their keyword
signatures; each tree node stores the OR of its members' signatures, the OR
of their neighborhood signatures, and the maximum neighbor keyword count.
Queries can then discard whole subtrees whose aggregates cannot cover a query
vertex's requirements.

Partitioning minimizes ``intra / (inter + 1)``: the sum of members' L1
distances to their part's centroid over the summed pairwise centroid
distances. Distances treat signatures as flat 0/1 vectors (one slot per group
bit position), so the L1 distance between two vertices is their Hamming
distance and a centroid holds per-position fractional means.

The optimizer restarts ``global_iter`` times from random member centers; each
restart runs up to ``local_iter`` rounds of (recompute centroids, reassign
members). Reassignment is capacity-bounded: members are visited in order and
each goes to the nearest part that still has room under
``ceil((1 + gamma) * |members| / fanout)``, ties to the lowest part index. A
round's strategy is kept only if its cost strictly improves, and the initial
assignment honors the same capacity so every returned strategy is balanced.
"""

from __future__ import annotations

import io
import math
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator, Sequence

import numpy as np

from .graph import DataGraph
from .signatures import AuxData, SignatureConfig, build_aux, unpack_bits

__all__ = [
    "IndexConfig",
    "IndexNode",
    "SubgraphIndex",
    "IndexFormatError",
    "IndexIntegrityError",
    "l1_distance",
    "centroid_of",
    "partition_cost",
    "cm_partitioning",
    "build_index",
    "save_index",
    "load_index",
]

INDEX_MAGIC = b"S3ANDIDX"
INDEX_VERSION = 1


class IndexFormatError(ValueError):
    """The file is not an index file of a supported version."""


class IndexIntegrityError(ValueError):
    """The file is a recognized index file but its payload is damaged."""


@dataclass(frozen=True)
class IndexConfig:
    """Tree and partitioning parameters."""

    fanout: int = 16
    gamma: float = 0.2
    global_iter: int = 5
    local_iter: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.fanout < 2:
            raise ValueError("fanout must be at least 2")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.global_iter < 1 or self.local_iter < 1:
            raise ValueError("iteration counts must be at least 1")


class IndexNode:
    """One tree node; leaves hold member vertex ids, internals hold children."""

    __slots__ = ("members", "children", "agg_bv", "agg_nbv", "nk_max")

    def __init__(
        self,
        members: np.ndarray | None,
        children: list["IndexNode"],
        agg_bv: np.ndarray,
        agg_nbv: np.ndarray,
        nk_max: int,
    ) -> None:
        self.members = members
        self.children = children
        self.agg_bv = agg_bv
        self.agg_nbv = agg_nbv
        self.nk_max = nk_max

    @property
    def is_leaf(self) -> bool:
        return self.members is not None

    def member_count(self) -> int:
        if self.is_leaf:
            return len(self.members)
        return sum(c.member_count() for c in self.children)


@dataclass
class SubgraphIndex:
    """A built tree plus everything needed to answer queries against it."""

    root: IndexNode
    index_config: IndexConfig
    aux: AuxData
    keyword_names: tuple[str, ...]
    vertex_count: int
    # Flattened-array form of the tree, built lazily for the compiled
    # traversal; derived state, so excluded from comparisons.
    fast_tree: object = field(default=None, repr=False, compare=False)

    @property
    def sig_config(self) -> SignatureConfig:
        return self.aux.cfg

    def iter_nodes(self) -> Iterator[tuple[IndexNode, int]]:
        """Preorder traversal yielding (node, depth-in-edges)."""
        stack: list[tuple[IndexNode, int]] = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            for child in reversed(node.children):
                stack.append((child, depth + 1))

    def depth(self) -> int:
        return max(d for _, d in self.iter_nodes())

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def leaf_count(self) -> int:
        return sum(1 for n, _ in self.iter_nodes() if n.is_leaf)


def l1_distance(bv: np.ndarray, centroid: np.ndarray, cfg: SignatureConfig) -> float:
    """L1 distance between one packed signature and a flat fractional centroid."""
    bits = unpack_bits(bv, cfg).astype(np.float64).reshape(-1)
    return float(np.abs(bits - np.asarray(centroid, dtype=np.float64).reshape(-1)).sum())


def centroid_of(part: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Per-position mean of a part's unpacked signature rows."""
    if len(part) == 0:
        raise ValueError("empty part has no centroid")
    return bits[np.asarray(part, dtype=np.int64)].mean(axis=0, dtype=np.float64)


def partition_cost(parts: Sequence[np.ndarray], bits: np.ndarray) -> float:
    """``intra / (inter + 1)`` with centroids recomputed from current membership.

    ``bits`` is the unpacked 0/1 signature matrix indexed by vertex id. Empty
    parts contribute nothing to either sum.
    """
    centroids = []
    intra = 0.0
    for part in parts:
        idx = np.asarray(part, dtype=np.int64)
        if idx.size == 0:
            continue
        rows = bits[idx].astype(np.float64, copy=False)
        c = rows.mean(axis=0)
        centroids.append(c)
        intra += float(np.abs(rows - c).sum())
    inter = 0.0
    for a in range(len(centroids)):
        for b in range(a + 1, len(centroids)):
            inter += float(np.abs(centroids[a] - centroids[b]).sum())
    return intra / (inter + 1.0)


def _distance_matrix(rows: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """L1 distances from 0/1 rows to fractional centroids.

    For x in {0,1}: |x - c| = x + c - 2xc, so the full matrix is a rank-one
    correction of a matmul, which is much faster than a direct abs-diff.
    """
    row_ones = rows.sum(axis=1)
    cent_sum = centroids.sum(axis=1)
    return row_ones[:, None] + cent_sum[None, :] - 2.0 * (rows @ centroids.T)


def _assign_capacitated(dist: np.ndarray, cap: int) -> np.ndarray:
    """Greedy in row order: nearest part with room, ties to lowest part index."""
    order = np.argsort(dist, axis=1, kind="stable")
    counts = np.zeros(dist.shape[1], dtype=np.int64)
    out = np.empty(dist.shape[0], dtype=np.int64)
    for i, prefs in enumerate(order):
        for p in prefs:
            if counts[p] < cap:
                out[i] = p
                counts[p] += 1
                break
    return out


def _parts_from_assignment(members: np.ndarray, assign: np.ndarray, n: int) -> list[np.ndarray]:
    return [members[assign == p] for p in range(n)]


def _cm_partitioning_detail(
    members: np.ndarray,
    n: int,
    cfg: IndexConfig,
    bits: np.ndarray,
    rng: np.random.Generator,
) -> tuple[list[np.ndarray], float, float]:
    """Returns (parts, best cost, initial cost of the winning restart)."""
    members = np.asarray(members, dtype=np.int64)
    if len(members) <= n:
        parts = [members[i : i + 1] for i in range(len(members))]
        cost = partition_cost(parts, bits)
        return parts, cost, cost
    cap = math.ceil((1.0 + cfg.gamma) * len(members) / n)
    rows = bits[members]
    best_assign: np.ndarray | None = None
    best_cost = math.inf
    best_init_cost = math.inf
    for _ in range(cfg.global_iter):
        centers = rng.choice(len(members), size=n, replace=False)
        centroids = rows[centers].astype(np.float32, copy=True)
        assign = _assign_capacitated(_distance_matrix(rows, centroids), cap)
        cost = partition_cost(_parts_from_assignment(members, assign, n), bits)
        init_cost = cost
        for _ in range(cfg.local_iter):
            centroids = _update_centroids(rows, assign, centroids, n)
            new_assign = _assign_capacitated(_distance_matrix(rows, centroids), cap)
            new_cost = partition_cost(_parts_from_assignment(members, new_assign, n), bits)
            if new_cost < cost:
                assign, cost = new_assign, new_cost
            else:
                break
        if cost < best_cost:
            best_assign, best_cost, best_init_cost = assign, cost, init_cost
    return _parts_from_assignment(members, best_assign, n), best_cost, best_init_cost


def _update_centroids(
    rows: np.ndarray, assign: np.ndarray, previous: np.ndarray, n: int
) -> np.ndarray:
    """Mean of each part's rows; an empty part keeps its previous centroid."""
    sums = np.zeros((n, rows.shape[1]), dtype=np.float64)
    np.add.at(sums, assign, rows.astype(np.float64, copy=False))
    counts = np.bincount(assign, minlength=n).astype(np.float64)
    out = previous.astype(np.float32, copy=True)
    filled = counts > 0
    out[filled] = (sums[filled] / counts[filled, None]).astype(np.float32)
    return out


def cm_partitioning(
    members: np.ndarray,
    n: int,
    cfg: IndexConfig,
    bits: np.ndarray,
    rng: np.random.Generator,
) -> list[np.ndarray]:
    """Split ``members`` into up to ``n`` balanced parts by signature similarity.

    With ``len(members) <= n`` every member gets its own part. Otherwise
    returns exactly ``n`` parts (some possibly empty), each within the
    ceiling capacity bound.
    """
    parts, _, _ = _cm_partitioning_detail(members, n, cfg, bits, rng)
    return parts


def _aggregate(
    bv_rows: np.ndarray, nbv_rows: np.ndarray, nk_vals: np.ndarray
) -> tuple[np.ndarray, np.ndarray, int]:
    return (
        np.bitwise_or.reduce(bv_rows, axis=0),
        np.bitwise_or.reduce(nbv_rows, axis=0),
        int(nk_vals.max()),
    )


def build_index(
    g: DataGraph,
    sig_config: SignatureConfig | None = None,
    index_config: IndexConfig | None = None,
    aux: AuxData | None = None,
) -> SubgraphIndex:
    """Build the tree for ``g``; precomputed ``aux`` is reused when given."""
    if g.vertex_count == 0:
        raise ValueError("cannot index an empty graph")
    sig_config = sig_config or SignatureConfig()
    index_config = index_config or IndexConfig()
    if aux is None:
        aux = build_aux(g, sig_config)
    elif aux.cfg != sig_config:
        raise ValueError("aux data was built with a different signature config")
    bits = unpack_bits(aux.bv, sig_config).astype(np.float32)
    rng = np.random.default_rng(index_config.seed)

    def build(members: np.ndarray) -> IndexNode:
        if len(members) <= index_config.fanout:
            agg_bv, agg_nbv, nk_max = _aggregate(
                aux.bv[members], aux.nbv[members], aux.nk[members]
            )
            return IndexNode(members, [], agg_bv, agg_nbv, nk_max)
        parts = cm_partitioning(members, index_config.fanout, index_config, bits, rng)
        children = [build(part) for part in parts if len(part) > 0]
        agg_bv = np.bitwise_or.reduce(np.stack([c.agg_bv for c in children]), axis=0)
        agg_nbv = np.bitwise_or.reduce(np.stack([c.agg_nbv for c in children]), axis=0)
        nk_max = max(c.nk_max for c in children)
        return IndexNode(None, children, agg_bv, agg_nbv, nk_max)

    root = build(np.arange(g.vertex_count, dtype=np.int64))
    return SubgraphIndex(
        root=root,
        index_config=index_config,
        aux=aux,
        keyword_names=tuple(g.keyword_names),
        vertex_count=g.vertex_count,
    )


# --- persistence ---------------------------------------------------------

# magic+version, then: signature config, index config, vertex and node counts
_HEADER = struct.Struct("<IIqIdIIqQQ")


def save_index(index: SubgraphIndex, path: str | Path) -> None:
    """Write the index to a little-endian binary file."""
    with open(path, "wb") as fh:
        _write_index(index, fh)


def _write_index(index: SubgraphIndex, fh: BinaryIO) -> None:
    sig = index.sig_config
    idx = index.index_config
    fh.write(INDEX_MAGIC)
    fh.write(bytes([INDEX_VERSION]))
    fh.write(
        _HEADER.pack(
            sig.group_count,
            sig.bits_per_group,
            sig.seed,
            idx.fanout,
            idx.gamma,
            idx.global_iter,
            idx.local_iter,
            idx.seed,
            index.vertex_count,
            index.node_count(),
        )
    )
    # keyword intern table
    fh.write(struct.pack("<I", len(index.keyword_names)))
    for name in index.keyword_names:
        data = name.encode("utf-8")
        fh.write(struct.pack("<H", len(data)))
        fh.write(data)
    # aux arrays
    fh.write(index.aux.bv.astype("<u8").tobytes())
    fh.write(index.aux.nbv.astype("<u8").tobytes())
    fh.write(index.aux.nk.astype("<i8").tobytes())
    # preorder node stream
    for node, _ in index.iter_nodes():
        kind = 0 if node.is_leaf else 1
        fh.write(struct.pack("<Bq", kind, node.nk_max))
        fh.write(node.agg_bv.astype("<u8").tobytes())
        fh.write(node.agg_nbv.astype("<u8").tobytes())
        if node.is_leaf:
            fh.write(struct.pack("<I", len(node.members)))
            fh.write(node.members.astype("<u4").tobytes())
        else:
            fh.write(struct.pack("<I", len(node.children)))


def _read_exact(fh: BinaryIO, count: int) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise IndexIntegrityError("index file is truncated")
    return data


def load_index(
    path: str | Path,
    requested_signature: SignatureConfig | None = None,
    requested_index_config: IndexConfig | None = None,
) -> SubgraphIndex:
    """Read an index file; the file's stored configs always win.

    If a requested config disagrees with the file, a warning is issued and
    the file's config is used, since the persisted signatures and aggregates
    were computed under it.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(INDEX_MAGIC))
        if magic != INDEX_MAGIC:
            raise IndexFormatError("not an index file (bad magic)")
        version = fh.read(1)
        if len(version) != 1:
            raise IndexIntegrityError("index file is truncated")
        if version[0] != INDEX_VERSION:
            raise IndexFormatError(f"unsupported index version {version[0]}")
        (
            group_count,
            bits_per_group,
            sig_seed,
            fanout,
            gamma,
            global_iter,
            local_iter,
            idx_seed,
            vertex_count,
            node_count,
        ) = _HEADER.unpack(_read_exact(fh, _HEADER.size))
        sig_config = SignatureConfig(
            group_count=group_count, bits_per_group=bits_per_group, seed=sig_seed
        )
        index_config = IndexConfig(
            fanout=fanout,
            gamma=gamma,
            global_iter=global_iter,
            local_iter=local_iter,
            seed=idx_seed,
        )
        for requested, stored, label in (
            (requested_signature, sig_config, "signature config"),
            (requested_index_config, index_config, "index config"),
        ):
            if requested is not None and requested != stored:
                warnings.warn(
                    f"index file was built with a different {label}; "
                    f"using the file's ({stored})",
                    stacklevel=2,
                )
        (name_count,) = struct.unpack("<I", _read_exact(fh, 4))
        names = []
        for _ in range(name_count):
            (length,) = struct.unpack("<H", _read_exact(fh, 2))
            names.append(_read_exact(fh, length).decode("utf-8"))
        m, w = sig_config.group_count, sig_config.words_per_group
        sig_bytes = vertex_count * m * w * 8
        bv = np.frombuffer(_read_exact(fh, sig_bytes), dtype="<u8").reshape(
            vertex_count, m, w
        )
        nbv = np.frombuffer(_read_exact(fh, sig_bytes), dtype="<u8").reshape(
            vertex_count, m, w
        )
        nk = np.frombuffer(_read_exact(fh, vertex_count * 8), dtype="<i8")
        aux = AuxData(
            sig_config,
            bv.astype(np.uint64),
            nbv.astype(np.uint64),
            nk.astype(np.int64),
        )
        root, consumed = _read_node(fh, m, w)
        if consumed != node_count:
            raise IndexIntegrityError(
                f"node stream holds {consumed} nodes, header says {node_count}"
            )
        if fh.read(1):
            raise IndexIntegrityError("trailing bytes after node stream")
    return SubgraphIndex(
        root=root,
        index_config=index_config,
        aux=aux,
        keyword_names=tuple(names),
        vertex_count=vertex_count,
    )


def _read_node(fh: BinaryIO, m: int, w: int) -> tuple[IndexNode, int]:
    kind, nk_max = struct.unpack("<Bq", _read_exact(fh, 9))
    if kind not in (0, 1):
        raise IndexIntegrityError(f"unknown node kind {kind}")
    agg_bv = (
        np.frombuffer(_read_exact(fh, m * w * 8), dtype="<u8")
        .reshape(m, w)
        .astype(np.uint64)
    )
    agg_nbv = (
        np.frombuffer(_read_exact(fh, m * w * 8), dtype="<u8")
        .reshape(m, w)
        .astype(np.uint64)
    )
    (count,) = struct.unpack("<I", _read_exact(fh, 4))
    if kind == 0:
        members = np.frombuffer(_read_exact(fh, count * 4), dtype="<u4").astype(
            np.int64
        )
        return IndexNode(members, [], agg_bv, agg_nbv, nk_max), 1
    children = []
    consumed = 1
    for _ in range(count):
        child, sub = _read_node(fh, m, w)
        children.append(child)
        consumed += sub
    return IndexNode(None, children, agg_bv, agg_nbv, nk_max), consumed
