"""Acceptance gate: every criterion at its stated tolerance.

Heavy ensembles are shared across criteria through module-scoped
fixtures.  Each test prints one PASS line on success (run with -s to
see them); a failed assertion marks the criterion failed.

Full module runtime is dominated by the 100-trajectory ensembles of
criteria 2 and 3 (a few minutes on two cores).
"""

import dataclasses
import math
import time

import numpy as np
import pytest

import jumpwalk.cli as cli
from jumpwalk import (RunConfig, build_graph, degree_stats, graph_timeseries,
                      initial_state, jsd_series, reduced_density, run_ensemble,
                      run_trajectory, step, structural_stats)
from jumpwalk.ensemble import trajectory_rng
from jumpwalk.kernel import KernelTable
from jumpwalk._engine import evolve, sample_jumps
from oracles import (all_jump_sequences, degree_moments, embed,
                     floyd_warshall_apl, pearson_assortativity)
from test_netmap import K4, PATH3, STAR4, graph_from_edges

SEED = 2024
WORKERS = 2
T_MAX = 1000
QUARTER = math.pi / 4


def report(criterion: int, message: str) -> None:
    print(f"[criterion {criterion}] PASS: {message}")


@pytest.fixture(scope="module")
def uniform_k():
    """Criterion 2 workhorse: uniform-kernel proxy, 100 trajectories."""
    config = RunConfig(q=1e6, coin="K", theta=QUARTER, t_max=T_MAX,
                       n_trajectories=100, seed=SEED, averaging="observables")
    return run_ensemble(config, workers=WORKERS)


@pytest.fixture(scope="module")
def q1_k():
    config = RunConfig(q=1.0, coin="K", theta=QUARTER, t_max=T_MAX,
                       n_trajectories=100, seed=SEED, averaging="observables")
    return run_ensemble(config, workers=WORKERS)


@pytest.fixture(scope="module")
def q1_h():
    config = RunConfig(q=1.0, coin="H", theta=QUARTER, t_max=T_MAX,
                       n_trajectories=100, seed=SEED, averaging="observables")
    return run_ensemble(config, workers=WORKERS)


@pytest.fixture(scope="module")
def q2_k():
    config = RunConfig(q=2.0, coin="K", theta=QUARTER, t_max=T_MAX,
                       n_trajectories=100, seed=SEED, averaging="observables")
    return run_ensemble(config, workers=WORKERS)


@pytest.fixture(scope="module")
def q15_pair():
    out = {}
    for coin in ("H", "K"):
        config = RunConfig(q=1.5, coin=coin, theta=QUARTER, t_max=T_MAX,
                           n_trajectories=50, seed=SEED, averaging="observables")
        out[coin] = run_ensemble(config, workers=WORKERS)
    return out


def test_criterion_1_standard_walk_ballistic_limit():
    alphas = {}
    elapsed = {}
    for coin in ("H", "K"):
        config = RunConfig(q=0.5, coin=coin, theta=QUARTER, t_max=T_MAX,
                           n_trajectories=1, seed=SEED)
        start = time.perf_counter()
        result = run_ensemble(config)
        elapsed[coin] = time.perf_counter() - start
        alphas[coin] = result.alpha
        assert result.alpha == pytest.approx(2.00, abs=0.05), coin
        assert elapsed[coin] < 1.0, f"{coin} took {elapsed[coin]:.2f}s"
    report(1, "q=0.5 ballistic limit: "
              + ", ".join(f"alpha_{c}={alphas[c]:.4f} ({elapsed[c] * 1e3:.0f} ms)"
                          for c in alphas))


def test_criterion_2_hyperballistic_limit(uniform_k):
    assert uniform_k.alpha == pytest.approx(3.0, abs=0.15)
    report(2, f"uniform-kernel proxy: alpha={uniform_k.alpha:.4f}"
              f" +- {uniform_k.alpha_se:.4f} (100 trajectories)")


def test_criterion_3_regime_ordering(uniform_k, q1_k, q2_k, q1_h):
    assert q1_k.alpha < q2_k.alpha < uniform_k.alpha
    assert 0.8 <= q1_k.alpha <= 1.3
    margin = q1_h.alpha - q1_k.alpha
    combined_se = q1_h.alpha_se + q1_k.alpha_se
    assert margin > combined_se
    report(3, f"alpha ordering {q1_k.alpha:.3f} < {q2_k.alpha:.3f} < "
              f"{uniform_k.alpha:.3f}; K diffusive at q=1; "
              f"H-K separation {margin:.3f} > {combined_se:.3f}")


def test_criterion_4_entanglement_saturation(q15_pair):
    finals = {}
    for coin, result in q15_pair.items():
        finals[coin] = result.entanglement_mean[-1]
        assert finals[coin] > 0.95, coin
    control = run_ensemble(RunConfig(q=0.5, coin="H", theta=QUARTER,
                                     t_max=T_MAX, seed=SEED))
    control_se = control.entanglement_mean[-1]
    assert control_se == pytest.approx(0.872, abs=0.01)
    report(4, f"q=1.5 saturation S_e(H)={finals['H']:.4f}, "
              f"S_e(K)={finals['K']:.4f}; memoryless control "
              f"S_e={control_se:.4f} within 0.872 +- 0.01")


def test_criterion_5_coin_distinguishability():
    _, memoryless = jsd_series(RunConfig(q=0.5, theta=QUARTER, t_max=T_MAX,
                                         seed=SEED))
    assert memoryless.max() < 1e-12
    config = RunConfig(q=1.3, theta=QUARTER, t_max=100, seed=SEED,
                       n_trajectories=8, averaging="observables")
    _, with_memory = jsd_series(config, workers=WORKERS)
    assert with_memory[99] > 0.01
    report(5, f"JSD(H,K): q=0.5 max={memoryless.max():.2e} < 1e-12; "
              f"q=1.3 at t=100: {with_memory[99]:.3f} > 0.01")


def test_criterion_6_unitarity_and_density_sanity(uniform_k, q1_k, q2_k,
                                                  q1_h, q15_pair):
    results = [uniform_k, q1_k, q2_k, q1_h, *q15_pair.values()]
    worst = max(r.max_norm_error for r in results)
    assert worst < 1e-10
    # replay a stochastic trajectory through the public operations and
    # check the density-matrix eigenvalues at every time
    config = RunConfig(q=1.5, coin="H", theta=QUARTER, t_max=300, seed=SEED)
    jumps = sample_jumps(KernelTable(config.q, config.t_max), config.t_max,
                         trajectory_rng(config.seed, 0))
    state = initial_state(config.coin_params)
    worst_lambda = 0.0
    worst_trace = 0.0
    for jump in jumps:
        state = step(state, config.coin_params, int(jump))
        lo, hi = reduced_density(state).eigenvalues()
        worst_lambda = max(worst_lambda, -lo, hi - 1.0)
        worst_trace = max(worst_trace, abs(lo + hi - 1.0))
    assert worst_lambda <= 1e-10
    assert worst_trace <= 1e-12
    report(6, f"max |norm-1| = {worst:.2e} over all accepted runs; "
              f"lambda bound excess {worst_lambda:.2e}, "
              f"trace defect {worst_trace:.2e} over 300-step replay")


def _dense_states_batched(coin_params, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Final dense-oracle states for every jump sequence of ``length``.

    All sequences evolve in one state matrix; step s applies the dense
    step unitary for each possible jump to the matching group of
    columns.
    """
    from jumpwalk.walk import coin_matrix

    sequences = np.array(list(all_jump_sequences(length)), dtype=np.int64)
    span = length * (length + 1) // 2
    n_sites = 2 * span + 1
    eye = np.eye(n_sites)
    coin_full = np.kron(coin_matrix(coin_params), eye)
    step_unitary = {}
    for jump in range(1, length + 1):
        s_l = np.roll(eye, jump, axis=0)
        s_r = np.roll(eye, -jump, axis=0)
        shift = np.block(
            [[s_l, np.zeros((n_sites, n_sites))],
             [np.zeros((n_sites, n_sites)), s_r]]).astype(np.complex128)
        step_unitary[jump] = shift @ coin_full
    states = np.zeros((2 * n_sites, len(sequences)), dtype=np.complex128)
    states[span, :] = 1 / math.sqrt(2)
    states[n_sites + span, :] = np.exp(1j * coin_params.initial_phase) / math.sqrt(2)
    for s in range(length):
        for jump in range(1, s + 2):
            cols = np.nonzero(sequences[:, s] == jump)[0]
            states[:, cols] = step_unitary[jump] @ states[:, cols]
    return sequences, states


@pytest.mark.parametrize("family", ["K", "H"])
def test_criterion_7_oracle_equivalence(family):
    from jumpwalk import CoinParams

    coin = CoinParams(family, QUARTER)
    worst = 0.0
    total = 0
    for length in range(1, 9):
        sequences, dense = _dense_states_batched(coin, length)
        span = length * (length + 1) // 2
        n_sites = 2 * span + 1
        for col, seq in enumerate(sequences):
            jumps = np.array(seq, dtype=np.int64)
            final = evolve(coin, jumps, occupancy_threshold=1e-9,
                           want_coin_stats=False, want_dist_stats=False).final_state
            got = np.concatenate([
                embed(final.psi_l, final.x_min, -span, span),
                embed(final.psi_r, final.x_min, -span, span)])
            worst = max(worst, float(np.max(np.abs(got - dense[:, col]))))
            total += 1
    assert worst < 1e-12
    report(7, f"coin {family}: {total} exhaustive jump sequences (t <= 8) "
              f"match the dense oracle; worst deviation {worst:.2e}")


def test_criterion_7_graph_fixtures():
    config = RunConfig(q=0.5, coin="K", theta=QUARTER, t_max=2, seed=SEED)
    record = run_trajectory(config, record_distributions=True)
    one_step = dataclasses.replace(record)
    one_step.jumps = record.jumps[:1]
    one_step.distributions = record.distributions[:2]
    graph1 = build_graph(one_step)
    assert graph1.vertices() == [-1, 0, 1]
    assert graph1.edges() == [(-1, 0), (0, 1)]
    graph2 = build_graph(record)
    assert graph2.vertices() == [-2, -1, 0, 1, 2]
    assert graph2.edges() == [(-2, -1), (-1, 0), (0, 1), (1, 2)]
    report(7, "t=1 and t=2 standard-walk graphs match hand-derived fixtures")


def test_criterion_8_graph_metric_oracles():
    for name, edges in (("path", PATH3), ("K4", K4), ("star", STAR4)):
        graph = graph_from_edges(edges)
        stats = degree_stats(graph)
        struct = structural_stats(graph)
        degrees = [graph.degree(v) for v in graph.vertices()]
        mean, std, skew, entropy = degree_moments(degrees)
        assert stats.mean == pytest.approx(mean, abs=1e-12), name
        assert stats.std == pytest.approx(std, abs=1e-12), name
        if skew is None:
            assert stats.skewness is None, name
        else:
            assert stats.skewness == pytest.approx(skew, abs=1e-12), name
        assert stats.entropy == pytest.approx(entropy, abs=1e-12), name
        apl = floyd_warshall_apl(graph.vertices(), graph.edges())
        assort = pearson_assortativity(
            {v: graph.degree(v) for v in graph.vertices()}, graph.edges())
        if apl is None:
            assert struct.avg_path_length is None, name
        else:
            assert struct.avg_path_length == pytest.approx(apl, abs=1e-12), name
        if assort is None:
            assert struct.assortativity is None, name
        else:
            assert struct.assortativity == pytest.approx(assort, abs=1e-12), name
    for q in (0.5, 1.3):
        record = run_trajectory(
            RunConfig(q=q, coin="K", theta=QUARTER, t_max=150, seed=SEED),
            record_distributions=True)
        series = graph_timeseries(record, list(range(1, 151)))
        n_v = [s.n_vertices for _, _, s in series]
        n_l = [s.n_edges for _, _, s in series]
        assert all(b >= a for a, b in zip(n_v, n_v[1:])), q
        assert all(b >= a for a, b in zip(n_l, n_l[1:])), q
    report(8, "fixture graph metrics match brute force; graph growth monotone")


def test_criterion_9_determinism(tmp_path):
    checked = []

    def assert_identical(label, args, names, variants):
        outputs = []
        for tag, extra in variants:
            out = tmp_path / f"{label}-{tag}"
            assert cli.main(args + extra + ["--out", str(out)]) == 0
            outputs.append(out)
        for name in names:
            blobs = {(out / name).read_bytes() for out in outputs}
            assert len(blobs) == 1, f"{label}/{name} differs across runs"
        checked.append(label)

    sim = ["simulate", "--q", "1.5", "--coin", "K", "--theta", "45",
           "--tmax", "80", "--ntraj", "12", "--seed", str(SEED)]
    assert_identical("simulate", sim,
                     ["variance.csv", "observables.csv", "distribution.csv"],
                     [("a", ["--workers", "1"]), ("b", ["--workers", "1"]),
                      ("c", ["--workers", "2"])])
    swp = ["sweep", "--q", "0.5,1.2", "--theta", "45", "--coins", "H,K",
           "--tmax", "60", "--ntraj", "4", "--seed", str(SEED)]
    assert_identical("sweep", swp, ["sweep.csv"],
                     [("a", ["--workers", "1"]), ("b", ["--workers", "2"])])
    net = ["network", "--q", "1.3", "--coin", "K", "--theta", "45",
           "--tmax", "60", "--seed", str(SEED)]
    assert_identical("network", net,
                     ["edges.txt", "network_metrics.csv", "degree_distribution.csv"],
                     [("a", []), ("b", [])])
    report(9, f"byte-identical outputs for {', '.join(checked)} "
              "(repeat runs and across parallelism degrees)")
