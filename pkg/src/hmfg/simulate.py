"""Finite-N hypergraph game simulation under shared (or singly-deviated)
policies, and the mean-field convergence experiment."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .game import MfgProblem, NeighborhoodMeanField
from .hypergraphs import MultiLayerHypergraph, incident_tuples, sample
from .kernels import MultiLayerHypergraphon

__all__ = [
    "SimulationRun",
    "share_policy",
    "agent_grid_indices",
    "empirical_neighborhood_mf",
    "simulate_game",
    "delta_mu",
    "delta_mu_experiment",
]


@dataclass
class SimulationRun:
    """Realized trajectories: states (T+1, N) and actions (T, N) as indices
    into the problem's state/action lists."""

    hypergraph: MultiLayerHypergraph
    states: np.ndarray
    actions: np.ndarray
    seed: object


def agent_grid_indices(M: int, N: int) -> np.ndarray:
    """Grid point of each agent: agent i (1-based) lies in the subinterval
    containing i/N, i.e. grid index ceil(i*M/N) (right-closed intervals)."""
    i = np.arange(1, N + 1)
    return (i * M + N - 1) // N - 1


def share_policy(policy: np.ndarray, N: int) -> np.ndarray:
    """Assign each of N agents the grid policy at its position: result has
    shape (T, N, n_states, n_actions)."""
    M = policy.shape[1]
    return policy[:, agent_grid_indices(M, N)]


def empirical_neighborhood_mf(run: SimulationRun, agent: int, t: int,
                              n_states: Optional[int] = None) -> NeighborhoodMeanField:
    """Empirical neighborhood mean field of one agent at one time, by direct
    enumeration of incident ordered tuples (the literal definition)."""
    H = run.hypergraph
    if not 0 <= t < run.states.shape[0]:
        raise ValueError(f"time {t} out of range")
    n = int(n_states if n_states is not None else run.states.max() + 1)
    layers = []
    for d, lay in enumerate(H.layers):
        arr = np.zeros((n,) * (lay.k - 1))
        for tup in incident_tuples(H, agent, d):
            arr[tuple(run.states[t, list(tup)])] += 1.0
        layers.append(arr / H.N ** (lay.k - 1))
    return NeighborhoodMeanField(tuple(layers))


def _empirical_nus(edge_arrays, cards, states_t, N, n):
    """Per-layer empirical neighborhood mean fields of all agents at once,
    as flat arrays of shape (N, n**(k-1)); equivalent to the ordered-tuple
    definition but accumulated per incident edge."""
    out = []
    for edges, k in zip(edge_arrays, cards):
        m = k - 1
        counts = np.zeros(N * n ** m)
        if len(edges):
            st = states_t[edges]  # (E, k)
            weights = n ** np.arange(m - 1, -1, -1)
            for focal_pos in range(k):
                others = st[:, [p for p in range(k) if p != focal_pos]]
                base = edges[:, focal_pos] * n ** m
                for perm in itertools.permutations(range(m)):
                    key = base + others[:, list(perm)] @ weights
                    counts += np.bincount(key, minlength=N * n ** m)
        out.append(counts.reshape(N, n ** m) / N ** m)
    return out


def simulate_game(problem: MfgProblem, H: MultiLayerHypergraph,
                  policies: np.ndarray, deviator=None, seed=0) -> SimulationRun:
    """Simulate the finite hypergraph game with synchronous updates.

    ``policies`` has shape (T, N, n_states, n_actions) (one policy per
    agent, e.g. from ``share_policy``).  ``deviator`` optionally replaces one
    agent's policy: a pair (agent index, policy of shape (T, n, u)).  All
    neighborhood mean fields at time t are computed from the time-t states
    before any time-t+1 state is drawn.
    """
    N = H.N
    T, n, u = problem.T, problem.n_states, problem.n_actions
    if policies.shape != (T, N, n, u):
        raise ValueError(f"expected per-agent policies of shape {(T, N, n, u)}")
    if tuple(H.cards) != tuple(problem.layer_cards):
        raise ValueError("hypergraph layer cardinalities do not match the problem")
    policies = np.array(policies)
    if deviator is not None:
        agent, dev_policy = deviator
        policies[:, agent] = dev_policy
    rng = np.random.default_rng(seed)

    alphas_right = np.arange(1, N + 1) / N
    mu0 = np.stack([np.asarray(problem.mu0(a), dtype=float) for a in alphas_right])
    states = np.empty((T + 1, N), dtype=np.int64)
    actions = np.empty((T, N), dtype=np.int64)
    states[0] = (rng.random(N)[:, None] > np.cumsum(mu0, axis=1)).sum(axis=1)

    edge_arrays = [lay.edges for lay in H.layers]
    cards = [lay.k for lay in H.layers]
    for t in range(T):
        probs = policies[t, np.arange(N), states[t]]  # (N, u)
        actions[t] = (rng.random(N)[:, None] > np.cumsum(probs, axis=1)).sum(axis=1)
        nus = _empirical_nus(edge_arrays, cards, states[t], N, n)
        trans = np.empty((N, n))
        for i in range(N):
            nu = NeighborhoodMeanField(tuple(
                lay[i].reshape((n,) * (k - 1)) for lay, k in zip(nus, cards)))
            trans[i] = problem.transition(t, int(states[t, i]), int(actions[t, i]), nu)
        states[t + 1] = (rng.random(N)[:, None] > np.cumsum(trans, axis=1)).sum(axis=1)
    return SimulationRun(H, states, actions, seed)


def delta_mu(run: SimulationRun, mf: np.ndarray) -> float:
    """Aggregate L1 gap between the empirical state distribution of one
    realization and the grid-averaged limiting mean field, summed over
    states and all stored time points."""
    Tp1, N = run.states.shape
    n = mf.shape[2]
    emp = np.stack([np.bincount(run.states[t], minlength=n) / N for t in range(Tp1)])
    return float(np.abs(emp - mf.mean(axis=1)).sum())


def delta_mu_experiment(problem: MfgProblem, W: MultiLayerHypergraphon,
                        policy: np.ndarray, mf: np.ndarray,
                        N_list: Sequence[int], realizations: int, seed: int = 0):
    """Mean-field approximation error versus system size.

    For each N, samples ``realizations`` hypergraphs and trajectories under
    the shared policy and measures the per-realization gap.  Returns the raw
    rows [(N, realization, delta_mu)] and summary rows
    [(N, mean, stderr, ci95_low, ci95_high)].
    """
    if realizations < 2:
        raise ValueError("need at least two realizations")
    rows = []
    summary = []
    for N in N_list:
        vals = []
        shared = share_policy(policy, N)
        for r in range(realizations):
            H = sample(W, N, seed=np.random.SeedSequence([seed, N, r, 0]))
            run = simulate_game(problem, H, shared,
                                seed=np.random.SeedSequence([seed, N, r, 1]))
            dm = delta_mu(run, mf)
            vals.append(dm)
            rows.append((N, r, dm))
        vals = np.asarray(vals)
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / np.sqrt(len(vals)))
        summary.append((N, mean, se, mean - 1.96 * se, mean + 1.96 * se))
    return rows, summary
