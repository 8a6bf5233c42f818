"""Solver core: limiting neighborhood mean fields on the discretization grid,
exact forward propagation, backwards-induction best responses, fixed-point
and online-mirror-descent equilibrium learning, exploitability, and mean
field distances.

Grid conventions: mean field ensembles are arrays of shape (T+1, M, n_states)
and policy ensembles arrays of shape (T, M, n_states, n_actions); grid point
i represents the subinterval with midpoint (i + 0.5) / M.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .game import MfgProblem, NeighborhoodMeanField, tables_at
from .kernels import VertexKernelGrid

__all__ = [
    "ValueTable",
    "grid_alphas",
    "uniform_policy",
    "neighborhood_mf",
    "neighborhood_mf_all",
    "forward_propagate",
    "best_response",
    "fixed_point_iteration",
    "omd_iteration",
    "exploitability",
    "mf_distance",
]


@dataclass
class ValueTable:
    """Backwards-induction workspace: V of shape (T+1, M, n) with V_T = 0,
    Q of shape (T, M, n, u)."""

    V: np.ndarray
    Q: np.ndarray


def grid_alphas(M: int) -> np.ndarray:
    return (np.arange(M) + 0.5) / M


def initial_mean_field(problem: MfgProblem, M: int) -> np.ndarray:
    mu = np.zeros((problem.T + 1, M, problem.n_states))
    for i, alpha in enumerate(grid_alphas(M)):
        mu[0, i] = np.asarray(problem.mu0(alpha), dtype=float)
    return mu


def uniform_policy(problem: MfgProblem, M: int) -> np.ndarray:
    u = problem.n_actions
    return np.full((problem.T, M, problem.n_states, u), 1.0 / u)


def _check_grids(grids: Sequence[VertexKernelGrid], problem: MfgProblem):
    if tuple(g.k for g in grids) != tuple(problem.layer_cards):
        raise ValueError("grid cardinalities do not match the problem's layers")
    Ms = {g.M for g in grids}
    if len(Ms) != 1:
        raise ValueError("all layer grids must share one resolution")
    return Ms.pop()


def neighborhood_mf_all(grids: Sequence[VertexKernelGrid], mu_t: np.ndarray) -> list[np.ndarray]:
    """Per-layer neighborhood mean fields for all grid points at once.

    Layer d of the result has shape (M, n, ..., n) with k_d - 1 state axes:
    the Riemann-sum contraction of the grid kernel against the state
    marginals of the other k_d - 1 vertices.
    """
    out = []
    for g in grids:
        res = g.values
        for _ in range(g.k - 1):
            res = np.tensordot(res, mu_t, axes=([1], [0]))
        out.append(res / g.M ** (g.k - 1))
    return out


def neighborhood_mf(grids, mf: np.ndarray, alpha_index: int, t: int) -> NeighborhoodMeanField:
    """Limiting neighborhood mean field of one grid point at one time."""
    layers = neighborhood_mf_all(grids, mf[t])
    return NeighborhoodMeanField(tuple(lay[alpha_index] for lay in layers))


def _forward(problem: MfgProblem, grids, policy: np.ndarray):
    """Forward mean-field propagation, keeping the per-step transition and
    reward tables (they are reused by best response and policy evaluation
    under the same frozen mean field)."""
    M = _check_grids(grids, problem)
    T = problem.T
    if policy.shape != (T, M, problem.n_states, problem.n_actions):
        raise ValueError(f"policy shape {policy.shape} does not match problem/grid")
    mu = initial_mean_field(problem, M)
    P_tabs = np.empty((T, M, problem.n_states, problem.n_actions, problem.n_states))
    R_tabs = np.empty((T, M, problem.n_states, problem.n_actions))
    for t in range(T):
        nus = neighborhood_mf_all(grids, mu[t])
        P_tabs[t], R_tabs[t] = tables_at(problem, t, nus)
        mu[t + 1] = np.einsum("ix,ixu,ixuy->iy", mu[t], policy[t], P_tabs[t])
    return mu, P_tabs, R_tabs


def forward_propagate(problem: MfgProblem, grids, policy: np.ndarray) -> np.ndarray:
    """Mean field induced by a policy ensemble (the evolution map on the grid)."""
    mu, _, _ = _forward(problem, grids, policy)
    return mu


def _tables_for_mf(problem: MfgProblem, grids, mf: np.ndarray):
    M = _check_grids(grids, problem)
    T = problem.T
    P_tabs = np.empty((T, M, problem.n_states, problem.n_actions, problem.n_states))
    R_tabs = np.empty((T, M, problem.n_states, problem.n_actions))
    for t in range(T):
        nus = neighborhood_mf_all(grids, mf[t])
        P_tabs[t], R_tabs[t] = tables_at(problem, t, nus)
    return P_tabs, R_tabs


def _induct(problem: MfgProblem, P_tabs, R_tabs):
    T, M = P_tabs.shape[:2]
    n, u = problem.n_states, problem.n_actions
    V = np.zeros((T + 1, M, n))
    Q = np.zeros((T, M, n, u))
    policy = np.zeros((T, M, n, u))
    for t in reversed(range(T)):
        Q[t] = R_tabs[t] + problem.gamma * np.einsum("ixuy,iy->ixu", P_tabs[t], V[t + 1])
        best = np.argmax(Q[t], axis=-1)  # first maximum: lowest action index
        V[t] = np.take_along_axis(Q[t], best[..., None], axis=-1)[..., 0]
        np.put_along_axis(policy[t], best[..., None], 1.0, axis=-1)
    return policy, ValueTable(V, Q)


def best_response(problem: MfgProblem, grids, mf: np.ndarray):
    """Exact best response to a frozen mean field by backwards induction.

    Returns a deterministic argmax policy (ties broken toward the lowest
    action index) and the value table.
    """
    P_tabs, R_tabs = _tables_for_mf(problem, grids, mf)
    return _induct(problem, P_tabs, R_tabs)


def _policy_values(problem: MfgProblem, mu, policy, R_tabs) -> np.ndarray:
    """Per grid point objective of ``policy`` under its own induced mean
    field ``mu`` and the matching reward tables."""
    T = problem.T
    discounts = problem.gamma ** np.arange(T)
    per_t = np.einsum("tix,tixu,tixu->ti", mu[:T], policy, R_tabs)
    return discounts @ per_t


def _mu0_values(problem: MfgProblem, mu, V0) -> np.ndarray:
    return np.einsum("ix,ix->i", mu[0], V0)


def exploitability(problem: MfgProblem, grids, policy: np.ndarray) -> float:
    """Average, over grid points, of the best-response value against the
    policy's induced mean field minus the policy's own value; zero exactly
    at an equilibrium."""
    mu, P_tabs, R_tabs = _forward(problem, grids, policy)
    _, vt = _induct(problem, P_tabs, R_tabs)
    gaps = _mu0_values(problem, mu, vt.V[0]) - _policy_values(problem, mu, policy, R_tabs)
    return float(gaps.mean())


def mf_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Aggregate L1 gap: sum over states and times of the absolute difference
    of the grid-averaged marginals."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a.mean(axis=1) - b.mean(axis=1)).sum())


def fixed_point_iteration(problem: MfgProblem, grids, init_policy: Optional[np.ndarray] = None,
                          n_iters: int = 100, damping: float = 0.0,
                          tol: Optional[float] = None):
    """Alternate mean-field propagation and exact best response.

    With ``damping`` in (0, 1) the propagated mean field is mixed with the
    previous one before the best response.  Convergence is not guaranteed;
    per-iteration diagnostics (exploitability, mean-field distance to the
    previous iterate, whether the argmax policy changed) expose failures.
    Stops early once exploitability falls to ``tol`` (if given).
    """
    if n_iters < 1:
        raise ValueError("need at least one iteration")
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    M = _check_grids(grids, problem)
    policy = uniform_policy(problem, M) if init_policy is None else np.array(init_policy)
    prev_mf = None
    prev_policy = None
    diagnostics = []
    mf = None
    for it in range(n_iters):
        mf, P_tabs, R_tabs = _forward(problem, grids, policy)
        br_policy, vt = _induct(problem, P_tabs, R_tabs)
        gaps = _mu0_values(problem, mf, vt.V[0]) - _policy_values(problem, mf, policy, R_tabs)
        expl = float(gaps.mean())
        diagnostics.append({
            "iteration": it,
            "exploitability": expl,
            "mf_distance_to_previous": float("nan") if prev_mf is None else mf_distance(mf, prev_mf),
            "policy_changed": bool(prev_policy is None or not np.array_equal(policy, prev_policy)),
        })
        if (tol is not None and expl <= tol) or it == n_iters - 1:
            break
        if damping > 0.0 and prev_mf is not None:
            mixed = (1.0 - damping) * mf + damping * prev_mf
            next_policy, _ = best_response(problem, grids, mixed)
            prev_mf = mixed
        else:
            next_policy = br_policy
            prev_mf = mf
        prev_policy = policy
        policy = next_policy
    return policy, mf, diagnostics


def _softmax(y: np.ndarray) -> np.ndarray:
    z = y - y.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def omd_iteration(problem: MfgProblem, grids, n_iters: int,
                  learning_rate: float = 1.0, init_temperature: float = 1.0):
    """Online mirror descent on cumulative action preferences.

    Maintains y per (time, grid point, state, action), sets the policy to
    softmax(y / temperature), and accumulates the policy-evaluation Q-values
    under the policy's own induced mean field.  Records exploitability each
    iteration; the temperature is held constant.
    """
    if learning_rate <= 0:
        raise ValueError("learning rate must be positive")
    if init_temperature <= 0:
        raise ValueError("temperature must be positive")
    M = _check_grids(grids, problem)
    T, n, u = problem.T, problem.n_states, problem.n_actions
    y = np.zeros((T, M, n, u))
    trace = []
    policy = _softmax(y / init_temperature)
    mf = None
    for _ in range(n_iters):
        mf, P_tabs, R_tabs = _forward(problem, grids, policy)
        # policy evaluation Q under the induced mean field
        V = np.zeros((M, n))
        Q = np.empty((T, M, n, u))
        for t in reversed(range(T)):
            Q[t] = R_tabs[t] + problem.gamma * np.einsum("ixuy,iy->ixu", P_tabs[t], V)
            V = np.einsum("ixu,ixu->ix", policy[t], Q[t])
        # exploitability of the current policy
        _, vt = _induct(problem, P_tabs, R_tabs)
        gaps = _mu0_values(problem, mf, vt.V[0]) - _policy_values(problem, mf, policy, R_tabs)
        trace.append(float(gaps.mean()))
        y += learning_rate * Q
        policy = _softmax(y / init_temperature)
    return policy, mf, trace
