"""Shared fixtures: a small hand-built collaboration network and helpers.

The 12-vertex graph below is the worked example used across the suite. Its
query asks for a five-person team (ml, backend, systems, frontend, data)
wired as two triangles sharing an edge. Mapping query vertex j to data
vertex j gives per-vertex neighbor differences (1, 0, 2, 0, 1), so the team
matches at threshold 2 under max and 4 under sum. Vertices 6 and 9 (sales,
legal) share no keyword with the query, vertex 11 (design) is the low-degree
neighbor of vertex 0, and vertices 5..10 form a chain that offers near-miss
teams; those corners pin the pruning-bound tests.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from s3and import (
    AggregateKind,
    DataGraph,
    IndexConfig,
    QueryGraph,
    SignatureConfig,
    SyntheticSpec,
    WorkloadSpec,
    build_index,
    generate_graph,
    generate_workload,
    is_answer,
    parse_graph,
    parse_query,
)

TEAM_GRAPH_TEXT = """t 12 13
v 0 ml
v 1 backend
v 2 systems
v 3 frontend
v 4 data
v 5 ml,data
v 6 sales
v 7 backend
v 8 frontend,data
v 9 legal
v 10 systems
v 11 design
e 0 1
e 0 3
e 0 11
e 1 2
e 1 3
e 2 3
e 3 4
e 4 5
e 5 6
e 6 7
e 7 8
e 8 9
e 9 10
"""

TEAM_QUERY_TEXT = """t 5 6
v 0 ml
v 1 backend
v 2 systems
v 3 frontend
v 4 data
e 0 1
e 0 2
e 1 3
e 2 3
e 2 4
e 3 4
"""

# Identity mapping of the query into vertices 0..4.
TEAM_MAPPING = (0, 1, 2, 3, 4)
TEAM_NDS = (1, 0, 2, 0, 1)


@pytest.fixture(scope="session")
def team_graph() -> DataGraph:
    return parse_graph(TEAM_GRAPH_TEXT)


@pytest.fixture(scope="session")
def team_query(team_graph) -> QueryGraph:
    return parse_query(TEAM_QUERY_TEXT, team_graph)


@pytest.fixture(scope="session")
def team_index(team_graph):
    return build_index(team_graph)


def naive_answers(
    g: DataGraph, q: QueryGraph, aggregate: AggregateKind, sigma: int
) -> list[tuple[int, ...]]:
    """Definition-only enumeration over all injective mappings.

    Deliberately has no pruning at all, so it is only usable on tiny
    instances; it validates the backtracking oracle, which validates the
    engine.
    """
    return sorted(
        m
        for m in itertools.permutations(range(g.vertex_count), q.vertex_count)
        if is_answer(g, q, m, aggregate, sigma)
    )


def mapping_set(answers) -> list[tuple[int, ...]]:
    return sorted(a.mapping for a in answers)


def random_instance(
    rng: np.random.Generator,
    max_vertices: int = 60,
    max_query: int = 5,
    min_vertices: int = 10,
) -> tuple[DataGraph, QueryGraph]:
    """One randomized small instance: synthetic graph plus a sampled query."""
    domain = int(rng.integers(4, 21))
    low = min(min_vertices, max_vertices)
    spec = SyntheticSpec(
        vertex_count=int(rng.integers(low, max_vertices + 1)),
        ring_neighbors=int(rng.integers(1, 3)),
        keyword_domain_size=domain,
        keywords_per_vertex=int(rng.integers(1, min(3, domain) + 1)),
        distribution=("uniform", "gaussian", "zipf")[int(rng.integers(0, 3))],
        seed=int(rng.integers(0, 2**31)),
    )
    g = generate_graph(spec)
    nq = int(rng.integers(2, max_query + 1))
    wspec = WorkloadSpec(
        query_count=1, query_size=min(nq, g.vertex_count), seed=int(rng.integers(0, 2**31))
    )
    q = generate_workload(g, wspec)[0]
    return g, q


def random_index_config(rng: np.random.Generator) -> IndexConfig:
    return IndexConfig(
        fanout=int(rng.choice([4, 8, 16])),
        gamma=float(rng.choice([0.0, 0.1, 0.2])),
        seed=int(rng.integers(0, 2**31)),
    )


def small_signature_config() -> SignatureConfig:
    return SignatureConfig()
