"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -rA to see them). Tolerances are pinned
here and nowhere else.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
import scipy.stats
from fastapi.testclient import TestClient

from nervemap.analysis import jacobi_eigh, linear_regression, pca
from nervemap.clustering import (
    DbscanParams,
    DistanceStrategy,
    PrecomputedDistances,
    dbscan,
    effective_mem_budget,
    pairwise_distances,
)
from nervemap.cli import main as cli_main
from nervemap.filters import FilterSpec
from nervemap.graph_query import connected_component, shortest_path
from nervemap.pipeline import MapperParams, compute_mapper, uniform_cloud
from nervemap.server import create_app

from conftest import cloud_from_array
from oracles import (
    all_shortest_paths,
    brute_force_nerve,
    circle_points,
    enumerate_interval_membership,
    naive_dbscan,
    ols_reference,
    union_find_components,
)
from test_graph_query import graph_family


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


# --- circle oracle ----------------------------------------------------------

def test_circle_oracle():
    with criterion("circle oracle (14-node cycle, brute-force verified, <1s)"):
        pts, max_gap = circle_points(1000, seed=42)
        pc = cloud_from_array(pts, names=["x", "y"])
        eps = 3.0 * max_gap
        params = MapperParams(
            filters=[FilterSpec(kind="column", column="y")],
            n=[8], p=[0.35], eps=eps, min_pts=3)
        run = compute_mapper(pc, params)
        graph = run.graph
        assert run.seconds < 1.0, f"pipeline took {run.seconds:.2f}s"
        assert graph.n_nodes == 14  # 2n - 2
        degree = [0] * graph.n_nodes
        for s, t, _ in graph.edges:
            degree[s] += 1
            degree[t] += 1
        assert all(d == 2 for d in degree)
        assert len(connected_component(graph, 0).node_ids) == graph.n_nodes

        # brute-force nerve by explicit enumeration, sharing nothing with
        # the pipeline: interval membership by comparison, naive DBSCAN,
        # all-pairs intersections
        intervals = [(iv.lo, iv.hi) for iv in run.cover.axes[0]]
        members = enumerate_interval_membership(
            [float(v) for v in run.fv.values[:, 0]], intervals)
        oracle_nodes = []
        for rows in members:
            clusters, _ = naive_dbscan([tuple(pts[r]) for r in rows], eps, 3)
            oracle_nodes.extend([rows[i] for i in cl] for cl in clusters)
        assert [n.rows for n in graph.nodes] == oracle_nodes
        oracle_edges = brute_force_nerve([set(r) for r in oracle_nodes])
        assert [(s, t, w) for s, t, w in graph.edges] == oracle_edges


# --- randomized instances shared by mode equivalence / thread determinism ---

N_INSTANCES = 200


def random_instance(seed):
    """Deterministic instance: blobby cloud plus valid random parameters."""
    rng = np.random.default_rng(1_000_003 + seed)
    n_rows = int(math.exp(rng.uniform(math.log(50), math.log(2000))))
    d = int(rng.integers(1, 33))
    k_blobs = int(rng.integers(1, 5))
    centers = rng.uniform(-5.0, 5.0, (k_blobs, d))
    spread = rng.uniform(0.2, 1.5)
    pts = centers[rng.integers(0, k_blobs, n_rows)] + \
        spread * rng.standard_normal((n_rows, d))
    pc = cloud_from_array(pts)

    if rng.random() < 0.25 and d >= 2:
        filters = [FilterSpec(kind="column", column="x0"),
                   FilterSpec(kind="l2-norm")]
    else:
        filters = [rng.choice([FilterSpec(kind="l2-norm"),
                               FilterSpec(kind="column", column="x0")])]
    axes = len(filters)
    sample = pts[rng.integers(0, n_rows, 300)]
    other = pts[rng.integers(0, n_rows, 300)]
    dists = np.sqrt(((sample - other) ** 2).sum(axis=1))
    eps = max(float(np.quantile(dists[dists > 0], rng.uniform(0.05, 0.5))), 1e-6)
    params = MapperParams(
        filters=filters,
        n=[int(v) for v in rng.integers(2, 13, axes)],
        p=[float(v) for v in rng.uniform(0.0, 0.6, axes)],
        eps=eps,
        min_pts=int(rng.integers(1, 9)),
        norm=str(rng.choice(["none", "minmax", "l2"])),
    )
    return pc, params


def _with_strategy(params, mode):
    return MapperParams(filters=params.filters, n=params.n, p=params.p,
                        eps=params.eps, min_pts=params.min_pts,
                        norm=params.norm, strategy=DistanceStrategy(mode=mode))


def test_mode_equivalence_200_instances():
    with criterion(f"mode equivalence ({N_INSTANCES} instances, byte-exact, <2min)"):
        t0 = time.perf_counter()
        for seed in range(N_INSTANCES):
            pc, params = random_instance(seed)
            pre = compute_mapper(pc, _with_strategy(params, "precomputed"))
            fly = compute_mapper(pc, _with_strategy(params, "on-the-fly"))
            assert pre.graph_bytes == fly.graph_bytes, f"instance seed={seed}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0, f"took {elapsed:.1f}s"


def test_thread_determinism_200_instances():
    with criterion(f"thread determinism ({N_INSTANCES} instances x threads 1/4/8)"):
        for seed in range(N_INSTANCES):
            pc, params = random_instance(seed)
            runs = {
                threads: compute_mapper(pc, params, threads=threads).graph_bytes
                for threads in (1, 4, 8)
            }
            assert runs[1] == runs[4] == runs[8], f"instance seed={seed}"


# --- DBSCAN oracle -----------------------------------------------------------

def test_dbscan_oracle_100_instances():
    with criterion("DBSCAN oracle (100 instances vs naive reference)"):
        for seed in range(100):
            rng = np.random.default_rng(7_000 + seed)
            n = int(rng.integers(10, 301))
            d = int(rng.integers(1, 7))
            pts = rng.uniform(0.0, 4.0, (n, d))
            eps = float(rng.uniform(0.1, 1.5))
            min_pts = int(rng.integers(1, 9))
            pc = cloud_from_array(pts)
            rows = np.arange(n)
            mine = dbscan(rows, PrecomputedDistances(
                pairwise_distances(pc, rows)), DbscanParams(eps, min_pts))
            ref_clusters, ref_noise = naive_dbscan(
                [tuple(p) for p in pts], eps, min_pts)
            assert mine.clusters == ref_clusters, f"seed={seed}"
            assert mine.noise == ref_noise, f"seed={seed}"


# --- desk-scale benchmark: speedup and memory --------------------------------

BENCH_ROWS = 50_000
BENCH_DIMS = 256


@pytest.fixture(scope="module")
def bench_runs():
    pc = uniform_cloud(BENCH_ROWS, BENCH_DIMS, seed=2024)
    params = MapperParams(
        filters=[FilterSpec(kind="column", column="x0")],
        n=[100], p=[0.3], eps=6.5, min_pts=5)
    t0 = time.perf_counter()
    runs = {}
    runs["vanilla-1"] = compute_mapper(
        pc, _with_strategy(params, "on-the-fly"), threads=1)
    runs["pre-1"] = compute_mapper(pc, params, threads=1)
    runs["pre-8"] = compute_mapper(pc, params, threads=8)
    total = time.perf_counter() - t0
    # correctness precedes speed: all three runs byte-identical
    assert runs["vanilla-1"].graph_bytes == runs["pre-1"].graph_bytes
    assert runs["pre-8"].graph_bytes == runs["pre-1"].graph_bytes
    return runs, total


def test_speedup_precomputed_vs_vanilla(bench_runs):
    with criterion("speedup: precomputed >= 2.0x vanilla "
                   f"({BENCH_ROWS}x{BENCH_DIMS}, n=100, 1 thread, <10min)"):
        runs, total = bench_runs
        ratio = runs["vanilla-1"].seconds / runs["pre-1"].seconds
        print(f"    vanilla {runs['vanilla-1'].seconds:.1f}s / "
              f"precomputed {runs['pre-1'].seconds:.1f}s = {ratio:.2f}x")
        assert total < 600.0, f"benchmark took {total:.0f}s"
        assert ratio >= 2.0, f"measured {ratio:.2f}x"


def test_speedup_8_threads_vs_1(bench_runs):
    with criterion("speedup: 8 threads >= 2.5x over 1 thread (precomputed)"):
        runs, _ = bench_runs
        ratio = runs["pre-1"].seconds / runs["pre-8"].seconds
        import os
        print(f"    1-thread {runs['pre-1'].seconds:.1f}s / "
              f"8-thread {runs['pre-8'].seconds:.1f}s = {ratio:.2f}x "
              f"on {os.cpu_count()} cpus")
        assert ratio >= 2.5, (
            f"measured {ratio:.2f}x; parallel speedup is bounded by the "
            f"machine's {os.cpu_count()} cpus")


def test_memory_honesty(bench_runs):
    with criterion("memory honesty: precomputed peak <= 2.0x vanilla "
                   "working set, within budget"):
        runs, _ = bench_runs
        budget = effective_mem_budget()
        vanilla_ws = runs["vanilla-1"].vanilla_workingset_bytes
        base = BENCH_ROWS * BENCH_DIMS * 8  # the dataset itself
        for key in ("pre-1", "pre-8"):
            run = runs[key]
            peak_total = base + run.peak_matrix_bytes
            print(f"    {key}: matrices {run.peak_matrix_bytes / 1e6:.1f} MB, "
                  f"total {peak_total / 1e6:.1f} MB vs vanilla ws "
                  f"{vanilla_ws / 1e6:.1f} MB")
            assert peak_total <= 2.0 * vanilla_ws
            assert run.peak_matrix_bytes <= budget  # hard cap, exact


# --- regression / PCA --------------------------------------------------------

def test_regression_criterion():
    with criterion("regression: exact fit to 1e-9; noisy matches reference "
                   "OLS (coef 1e-8, p 1e-6, <1s)"):
        t0 = time.perf_counter()
        x = np.linspace(-3.0, 3.0, 10)
        pc = cloud_from_array(np.column_stack([x, 2.0 * x + 1.0]),
                              names=["x", "y"])
        res = linear_regression(pc, None, "y", ["x"])
        assert abs(res.coefficients[0] - 1.0) <= 1e-9
        assert abs(res.coefficients[1] - 2.0) <= 1e-9
        assert abs(res.r_squared - 1.0) <= 1e-9

        rng = np.random.default_rng(777)
        xs = rng.uniform(-2.0, 2.0, 50)
        zs = rng.uniform(-1.0, 1.0, 50)
        ys = 3.0 * xs - 2.0 * zs + 0.5 + rng.normal(0.0, 0.1, 50)
        pc = cloud_from_array(np.column_stack([xs, ys, zs]),
                              names=["x", "y", "z"])
        res = linear_regression(pc, None, "y", ["x", "z"])
        beta_ref, rss_ref, r2_ref = ols_reference(
            [list(xs), list(zs)], list(ys))
        for mine, ref in zip(res.coefficients, beta_ref):
            assert abs(mine - ref) <= 1e-8
        df = 50 - 3
        design = np.column_stack([np.ones(50), xs, zs])
        cov = (rss_ref / df) * np.linalg.inv(design.T @ design)
        for i in range(3):
            t_ref = beta_ref[i] / math.sqrt(cov[i, i])
            p_ref = 2.0 * scipy.stats.t.sf(abs(t_ref), df)
            assert abs(res.p_values[i] - p_ref) <= 1e-6
        assert time.perf_counter() - t0 < 1.0


def test_pca_criterion():
    with criterion("PCA: orthonormal 1e-8, variances nonincreasing, "
                   "k=d reconstruction 1e-8, matches eigendecomposition"):
        for seed in range(10):
            rng = np.random.default_rng(31_000 + seed)
            pts = rng.standard_normal((60, 5)) * rng.uniform(0.5, 2.5, 5)
            pc = cloud_from_array(pts)
            res = pca(pc, None, 5)
            gram = res.components @ res.components.T
            assert np.abs(gram - np.eye(5)).max() <= 1e-8
            ev = res.explained_variance
            assert all(a >= b - 1e-12 for a, b in zip(ev, ev[1:]))
            centered = pts - pts.mean(axis=0)
            rebuilt = res.projected @ res.components
            assert np.abs(rebuilt - centered).max() <= 1e-8
            ref = np.sort(np.linalg.eigvalsh(
                centered.T @ centered / (len(pts) - 1)))[::-1]
            assert np.allclose(ev, ref, rtol=1e-8, atol=1e-10)


# --- graph-query oracles -----------------------------------------------------

def test_graph_query_oracles():
    with criterion("graph queries equal exhaustive enumeration "
                   "(fixed <=10-node family)"):
        for g in graph_family():
            adj = g.adjacency()
            edges = [(s, t) for s, t, _ in g.edges]
            for comp in union_find_components(g.n_nodes, edges):
                for seed in comp:
                    assert set(connected_component(g, seed).node_ids) == comp
            for s in range(g.n_nodes):
                for t in range(g.n_nodes):
                    got = shortest_path(g, s, t)
                    want = all_shortest_paths(adj, s, t)
                    assert got == (min(want) if want else None)


# --- CLI / server parity -----------------------------------------------------

def test_cli_server_parity(tmp_path):
    with criterion("CLI/server parity (20 random parameter sets, byte-exact)"):
        rng = np.random.default_rng(555)
        pts = rng.normal(0.0, 2.0, (300, 3))
        labels = [str(rng.integers(0, 3)) for _ in range(300)]
        csv_lines = ["a,b,c,lab"] + [
            f"{p[0]!r},{p[1]!r},{p[2]!r},{labels[i]}"
            for i, p in enumerate(pts.tolist())
        ]
        csv_data = ("\n".join(csv_lines) + "\n").encode()
        src = tmp_path / "data.csv"
        src.write_bytes(csv_data)

        app = create_app()
        with TestClient(app) as client:
            resp = client.post("/api/dataset", content=csv_data)
            dataset_id = resp.json()["dataset_id"]
            for i in range(20):
                prng = np.random.default_rng(9_000 + i)
                n = int(prng.integers(2, 9))
                p = round(float(prng.uniform(0.0, 0.5)), 3)
                eps = round(float(prng.uniform(0.5, 3.0)), 3)
                min_pts = int(prng.integers(1, 5))
                norm = str(prng.choice(["none", "minmax"]))
                filt = {"kind": "l2-norm"} if prng.random() < 0.5 else \
                    {"kind": "column", "column": "a"}
                out_dir = tmp_path / f"run{i}"
                code = cli_main([
                    "mapper", "--input", str(src),
                    "--output-dir", str(out_dir),
                    "--filter", json.dumps(filt),
                    "--intervals", str(n), "--overlaps", repr(p),
                    "--eps", repr(eps), "--min-pts", str(min_pts),
                    "--norm", norm, "--threads", "1"])
                assert code == 0
                file_bytes = next(out_dir.glob("mapper_*.json")).read_bytes()
                resp = client.post("/api/mapper", json={
                    "dataset_id": dataset_id, "filters": [filt],
                    "n": n, "p": p, "eps": eps, "min_pts": min_pts,
                    "norm": norm})
                assert resp.status_code == 200, resp.text
                assert resp.content == file_bytes, f"param set {i}"
