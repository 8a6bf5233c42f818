import numpy as np
import pytest

from hmfg import (
    HypergraphLayer,
    MultiLayerHypergraph,
    MultiLayerHypergraphon,
    NeighborhoodMeanField,
    agent_grid_indices,
    builtin,
    delta_mu,
    delta_mu_experiment,
    empirical_neighborhood_mf,
    rumor_problem,
    sample,
    share_policy,
    simulate_game,
    sis_problem,
    uniform_policy,
)
from hmfg.simulate import SimulationRun, _empirical_nus

from conftest import constant_layer, fig1_hypergraph


def test_agent_grid_indices():
    # M=2, N=4: agents 1,2 -> first interval, agents 3,4 -> second
    assert agent_grid_indices(2, 4).tolist() == [0, 0, 1, 1]
    # M = N: agent i gets grid point i exactly
    assert agent_grid_indices(5, 5).tolist() == [0, 1, 2, 3, 4]
    assert agent_grid_indices(4, 2).tolist() == [1, 3]


def test_share_policy():
    rng = np.random.default_rng(0)
    pol = rng.random((3, 2, 2, 2))
    pol /= pol.sum(axis=-1, keepdims=True)
    shared = share_policy(pol, 4)
    assert shared.shape == (3, 4, 2, 2)
    assert np.array_equal(shared[:, 0], pol[:, 0])
    assert np.array_equal(shared[:, 1], pol[:, 0])
    assert np.array_equal(shared[:, 2], pol[:, 1])
    assert np.array_equal(shared[:, 3], pol[:, 1])
    constant = np.broadcast_to(pol[:, :1], pol.shape).copy()
    shared_c = share_policy(constant, 7)
    assert np.all(shared_c == shared_c[:, :1])


def _run_with_states(H, states):
    T = states.shape[0] - 1
    return SimulationRun(H, states, np.zeros((max(T, 1), H.N), dtype=np.int64), 0)


def test_empirical_neighborhood_mf_fig1():
    H = fig1_hypergraph()
    states = np.zeros((1, 5), dtype=np.int64)  # all agents in state 0
    run = _run_with_states(H, states)
    nu = empirical_neighborhood_mf(run, 0, 0, n_states=2)
    # two hyperedges through vertex 0 give 4 ordered pairs out of 25
    assert nu.layers[1][0, 0] == pytest.approx(4 / 25)
    assert nu.mass(1) == pytest.approx(4 / 25)
    # graph layer: two of five neighbors
    assert nu.layers[0][0] == pytest.approx(2 / 5)
    # vertex 1 sits in one hyperedge and no graph edge
    nu1 = empirical_neighborhood_mf(run, 1, 0, n_states=2)
    assert nu1.mass(0) == 0.0
    assert nu1.mass(1) == pytest.approx(2 / 25)


def test_empirical_neighborhood_mf_isolated_and_complete():
    iso = MultiLayerHypergraph(3, np.zeros(3), [HypergraphLayer(2, np.empty((0, 2)))])
    run = _run_with_states(iso, np.zeros((1, 3), dtype=np.int64))
    nu = empirical_neighborhood_mf(run, 0, 0, n_states=2)
    assert np.all(nu.layers[0] == 0.0)
    N = 6
    edges = np.array([[i, j] for i in range(N) for j in range(i + 1, N)])
    comp = MultiLayerHypergraph(N, np.zeros(N), [HypergraphLayer(2, edges)])
    run = _run_with_states(comp, np.full((1, N), 1, dtype=np.int64))
    nu = empirical_neighborhood_mf(run, 2, 0, n_states=3)
    assert nu.layers[0][1] == pytest.approx((N - 1) / N)
    with pytest.raises(ValueError):
        empirical_neighborhood_mf(run, 0, 5, n_states=3)


def test_empirical_nus_matches_literal_definition():
    rng = np.random.default_rng(1)
    W = MultiLayerHypergraphon((builtin("unif2"), builtin("unif3")))
    H = sample(W, 12, seed=4)
    n = 4
    states = rng.integers(0, n, size=(1, 12))
    run = _run_with_states(H, states)
    fast = _empirical_nus([l.edges for l in H.layers], [l.k for l in H.layers],
                          states[0], 12, n)
    for agent in range(12):
        literal = empirical_neighborhood_mf(run, agent, 0, n_states=n)
        for d, k in enumerate([2, 3]):
            assert np.allclose(fast[d][agent].reshape((n,) * (k - 1)),
                               literal.layers[d], atol=1e-12)
        # masses are integer multiples of N^{-(k-1)}
        for d, k in enumerate([2, 3]):
            scaled = literal.layers[d].sum() * 12 ** (k - 1)
            assert scaled == pytest.approx(round(scaled), abs=1e-9)


def test_simulate_game_deterministic_dynamics():
    """Deterministic initial condition, deterministic policy, transition
    probabilities all 0/1: trajectories are seed-independent and match a
    hand-computed trace."""
    prob = rumor_problem(tau=(10.0, 10.0), block_init=True, T=4)
    N = 4
    edges = np.array([[i, j] for i in range(N) for j in range(i + 1, N)])
    tri = np.array([[i, j, k] for i in range(N) for j in range(i + 1, N)
                    for k in range(j + 1, N)])
    H = MultiLayerHypergraph(N, np.zeros(N), [HypergraphLayer(2, edges),
                                              HypergraphLayer(3, tri)])
    spread_always = np.zeros((prob.T, N, 6, 2))
    spread_always[..., 1] = 1.0
    runs = [simulate_game(prob, H, spread_always, seed=s) for s in (0, 1, 99)]
    for run in runs[1:]:
        assert np.array_equal(run.states, runs[0].states)
        assert np.array_equal(run.actions, runs[0].actions)
    st = runs[0].states
    # alphas i/N: agents 1,2 ignorant (alpha <= 0.5), agents 3,4 aware
    assert st[0].tolist() == [0, 0, 1, 1]
    # epoch 0 records the spread action as a pair state
    assert st[1].tolist() == [3, 3, 5, 5]
    # aware spreaders infect every ignorant neighbor surely (tau huge)
    assert st[2].tolist() == [1, 1, 1, 1]
    assert st[3].tolist() == [5, 5, 5, 5]
    assert st[4].tolist() == [1, 1, 1, 1]


def test_simulate_game_no_edges_keeps_awareness_constant():
    prob = rumor_problem(T=6)
    N = 20
    H = MultiLayerHypergraph(N, np.zeros(N), [HypergraphLayer(2, np.empty((0, 2))),
                                              HypergraphLayer(3, np.empty((0, 3)))])
    pol = share_policy(uniform_policy(prob, 5), N)
    run = simulate_game(prob, H, pol, seed=3)
    aware = np.isin(run.states, [1, 4, 5]).sum(axis=1)
    assert np.all(aware == aware[0])


def test_simulate_game_validation_and_determinism():
    prob = sis_problem(T=3)
    W = MultiLayerHypergraphon((builtin("unif2"), builtin("unif3")))
    H = sample(W, 8, seed=0)
    pol = share_policy(uniform_policy(prob, 4), 8)
    a = simulate_game(prob, H, pol, seed=11)
    b = simulate_game(prob, H, pol, seed=11)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.actions, b.actions)
    with pytest.raises(ValueError):
        simulate_game(prob, H, pol[:, :5], seed=0)
    bad_H = MultiLayerHypergraph(8, np.zeros(8), [HypergraphLayer(2, np.empty((0, 2)))])
    with pytest.raises(ValueError):
        simulate_game(prob, bad_H, pol, seed=0)


def test_simulate_game_deviator():
    prob = sis_problem(T=3)
    W = MultiLayerHypergraphon((builtin("unif2"), builtin("unif3")))
    H = sample(W, 8, seed=0)
    pol = share_policy(uniform_policy(prob, 4), 8)
    never_protect = np.zeros((3, 2, 2))
    never_protect[..., 0] = 1.0
    run = simulate_game(prob, H, pol, deviator=(2, never_protect), seed=5)
    # susceptible deviator never takes the protective action
    sus = run.states[:3, 2] == 0
    assert np.all(run.actions[sus, 2] == 0)


def test_delta_mu_zero_for_matching_empirical():
    prob = sis_problem(T=2)
    N = 6
    H = MultiLayerHypergraph(N, np.zeros(N), [HypergraphLayer(2, np.empty((0, 2)))])
    states = np.zeros((3, N), dtype=np.int64)
    states[:, :3] = 1  # empirical distribution (0.5, 0.5) at every t
    run = _run_with_states(H, states)
    mf = np.full((3, 4, 2), 0.5)
    assert delta_mu(run, mf) == 0.0
    mf_off = mf.copy()
    mf_off[:, :, 0] = 1.0
    mf_off[:, :, 1] = 0.0
    assert delta_mu(run, mf_off) == pytest.approx(3.0)


def test_delta_mu_experiment_shapes_and_determinism():
    prob = sis_problem(T=3)
    W = MultiLayerHypergraphon((builtin("unif2"), builtin("unif3")))
    M = 4
    from hmfg import discretize, fixed_point_iteration

    grids = [discretize(l, M) for l in W.layers]
    policy, mf, _ = fixed_point_iteration(prob, grids, n_iters=3)
    rows, summary = delta_mu_experiment(prob, W, policy, mf, [8, 16], 3, seed=2)
    assert len(rows) == 6
    assert [s[0] for s in summary] == [8, 16]
    for N, mean, se, lo, hi in summary:
        assert lo == pytest.approx(mean - 1.96 * se)
        assert hi == pytest.approx(mean + 1.96 * se)
    rows2, summary2 = delta_mu_experiment(prob, W, policy, mf, [8, 16], 3, seed=2)
    assert rows == rows2
    with pytest.raises(ValueError):
        delta_mu_experiment(prob, W, policy, mf, [8], 1, seed=0)
