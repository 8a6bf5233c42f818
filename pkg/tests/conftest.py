"""Shared helpers: constant kernels, small random problems, and independent
reference implementations used as oracles."""

import itertools

import numpy as np
import pytest

from hmfg import (
    HypergraphonLayer,
    MfgProblem,
    NeighborhoodMeanField,
    VertexKernelGrid,
)


def constant_layer(k: int, value: float) -> HypergraphonLayer:
    f = lambda v: np.full(np.asarray(v).shape[:-1], value)
    return HypergraphonLayer(k, lambda v, s: f(v), vertex_kernel=f,
                             name=f"const{value}")


def constant_grid(k: int, M: int, value: float) -> VertexKernelGrid:
    return VertexKernelGrid(k, M, np.full((M,) * k, value))


def fig1_hypergraph():
    """The worked five-vertex example: one graph layer with edges
    {1,4}, {1,5} and one 3-uniform layer with hyperedges {1,3,4}, {1,2,5},
    in zero-based vertex labels."""
    from hmfg import HypergraphLayer, MultiLayerHypergraph

    return MultiLayerHypergraph(
        5,
        (np.arange(5) + 0.5) / 5,
        [
            HypergraphLayer(2, np.array([[0, 3], [0, 4]])),
            HypergraphLayer(3, np.array([[0, 2, 3], [0, 1, 4]])),
        ],
    )


def random_tiny_problem(rng: np.random.Generator, n=2, u=2, T=3,
                        layer_cards=(2,)) -> MfgProblem:
    """A random dense problem whose transition mixes a fixed stochastic
    matrix with the neighborhood mass, exercising the mean-field coupling."""
    base_P = rng.random((T, n, u, n)) + 0.1
    base_P /= base_P.sum(axis=-1, keepdims=True)
    base_R = rng.standard_normal((T, n, u))
    coupling = rng.standard_normal((len(layer_cards), n))

    def masses(nu):
        out = np.zeros(n)
        for d, lay in enumerate(nu.layers):
            for axis in range(lay.ndim):
                other = tuple(a for a in range(lay.ndim) if a != axis)
                out += lay.sum(axis=other)
        return out

    def transition(t, x, a, nu):
        m = float(nu.layers[0].sum())
        w = min(max(m, 0.0), 1.0)
        mixed = (1 - 0.5 * w) * base_P[t, x, a] + 0.5 * w / n
        return mixed / mixed.sum()

    def reward(t, x, a, nu):
        extra = 0.0
        for d, lay in enumerate(nu.layers):
            s = np.zeros(n)
            for axis in range(lay.ndim):
                other = tuple(ax for ax in range(lay.ndim) if ax != axis)
                s += lay.sum(axis=other)
            extra += float(coupling[d] @ s)
        return float(base_R[t, x, a]) + extra

    mu0_vec = rng.random(n) + 0.1
    mu0_vec /= mu0_vec.sum()
    return MfgProblem(
        states=list(range(n)), actions=list(range(u)), T=T, gamma=1.0,
        mu0=lambda alpha: mu0_vec, transition=transition, reward=reward,
        layer_cards=tuple(layer_cards),
    )


def random_nu(rng: np.random.Generator, n: int, layer_cards, scale=1.0):
    layers = []
    for k in layer_cards:
        lay = rng.random((n,) * (k - 1))
        lay *= scale * rng.random() / max(lay.sum(), 1e-12)
        layers.append(lay)
    return NeighborhoodMeanField(tuple(layers))


def enumerate_best_value(problem, grids, mf, alpha_index):
    """Best achievable objective at one grid point against a frozen mean
    field, by exhaustive search over all deterministic time-state-action
    policies.  Exponential; only for tiny instances."""
    from hmfg.meanfield import neighborhood_mf

    n, u, T = problem.n_states, problem.n_actions, problem.T
    nus = [neighborhood_mf(grids, mf, alpha_index, t) for t in range(T)]
    P = np.empty((T, n, u, n))
    R = np.empty((T, n, u))
    for t in range(T):
        for x in range(n):
            for a in range(u):
                P[t, x, a] = problem.transition(t, x, a, nus[t])
                R[t, x, a] = problem.reward(t, x, a, nus[t])
    alpha = (alpha_index + 0.5) / grids[0].M
    mu0 = np.asarray(problem.mu0(alpha), dtype=float)

    best = -np.inf
    for choice in itertools.product(range(u), repeat=T * n):
        acts = np.asarray(choice).reshape(T, n)
        dist = mu0.copy()
        total = 0.0
        disc = 1.0
        for t in range(T):
            sel = acts[t]
            total += disc * float(dist @ R[t, np.arange(n), sel])
            dist = dist @ P[t, np.arange(n), sel]
            disc *= problem.gamma
        best = max(best, total)
    return best


def report(criterion: int, description: str, ok: bool):
    status = "PASS" if ok else "FAIL"
    print(f"\n[criterion {criterion:2d}] {status}: {description}", flush=True)
    assert ok, f"criterion {criterion}: {description}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
