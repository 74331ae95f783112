"""
Running a parameter sweep
=========================

The benchmark harness sweeps one parameter at a time while holding the
rest at their defaults, runs a query workload per cell (engine and
baseline, verifying their answers agree), and writes CSV plus an optional
JSON report with the full configuration echo. This demo keeps the graphs
small so it finishes in seconds; drop the overrides for the full-size run.
"""

import json
import tempfile
from pathlib import Path

from s3and import (
    BenchConfig,
    SyntheticSpec,
    WorkloadSpec,
    run_benchmark,
    write_bench_csv,
    write_bench_json,
)

cfg = BenchConfig(
    base=SyntheticSpec(vertex_count=500, keyword_domain_size=20, keywords_per_vertex=2),
    workload=WorkloadSpec(query_count=5, query_size=4),
    sweeps=("sigma_max", "query_size"),
)

rows = run_benchmark(cfg)

print(f"{'parameter':<18} {'value':>5} {'agg':>4} {'sigma':>5} "
      f"{'power':>7} {'engine ms':>10} {'baseline ms':>12} {'answers':>8}")
for r in rows:
    print(
        f"{r.param_name:<18} {r.param_value!s:>5} {r.agg:>4} {r.sigma:>5} "
        f"{r.pruning_power:>7.4f} {r.wall_ms_engine:>10.3f} "
        f"{r.wall_ms_baseline:>12.3f} {r.answers:>8}"
    )

with tempfile.TemporaryDirectory() as tmp:
    csv_path = Path(tmp) / "bench.csv"
    json_path = Path(tmp) / "bench.json"
    with open(csv_path, "w", newline="") as fh:
        write_bench_csv(rows, fh)
    write_bench_json(cfg, rows, json_path)
    print(f"\nCSV header: {csv_path.read_text().splitlines()[0]}")
    doc = json.loads(json_path.read_text())
    print(f"JSON config echo keys: {sorted(doc['config'])}")
