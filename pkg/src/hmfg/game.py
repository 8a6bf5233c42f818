"""Problem definitions: finite state/action mean field games with
neighborhood-mean-field coupling, the extended-state construction for
action-coupled interactions, and the rumor spreading and SIS instances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "NeighborhoodMeanField",
    "MfgProblem",
    "extend_state_space",
    "rumor_problem",
    "sis_problem",
    "slot_state_masses",
]


@dataclass(frozen=True)
class NeighborhoodMeanField:
    """Per layer, a sub-probability measure on state tuples of the layer's
    neighbor slots: layer d is a nonnegative array of shape (n,) * (k_d - 1)
    with total mass equal to the agent's (discretized) degree."""

    layers: tuple[np.ndarray, ...]

    def mass(self, d: int) -> float:
        return float(self.layers[d].sum())


def slot_state_masses(nu_layer: np.ndarray) -> np.ndarray:
    """Sum of the per-slot marginals of one layer: entry x is the expected
    number of neighbor slots in state x under the (sub-probability) measure."""
    nu_layer = np.asarray(nu_layer)
    total = np.zeros(nu_layer.shape[0])
    for axis in range(nu_layer.ndim):
        other = tuple(a for a in range(nu_layer.ndim) if a != axis)
        total += nu_layer.sum(axis=other)
    return total


@dataclass
class MfgProblem:
    """A finite-horizon mean field game with neighborhood coupling.

    ``transition(t, x, u, nu)`` returns a probability vector over states and
    ``reward(t, x, u, nu)`` a real, where ``nu`` is a NeighborhoodMeanField
    carrying one sub-probability array per layer in ``layer_cards``.
    ``mu0(alpha)`` gives the initial state distribution at graphon position
    alpha.  ``tabulate``, when set, vectorizes transition/reward over grid
    points: (t, [per-layer arrays of shape (M, n, ..., n)]) -> (P, R) with
    P of shape (M, n, u, n) and R of shape (M, n, u); it must agree with the
    scalar functions.
    """

    states: list
    actions: list
    T: int
    gamma: float
    mu0: Callable[[float], np.ndarray]
    transition: Callable[[int, int, int, NeighborhoodMeanField], np.ndarray]
    reward: Callable[[int, int, int, NeighborhoodMeanField], float]
    layer_cards: tuple[int, ...]
    tabulate: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("horizon must be at least 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("discount must lie in (0, 1]")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)


def _generic_tabulate(problem: MfgProblem):
    n, u = problem.n_states, problem.n_actions

    def tab(t, nus):
        M = nus[0].shape[0]
        P = np.empty((M, n, u, n))
        R = np.empty((M, n, u))
        for i in range(M):
            nu = NeighborhoodMeanField(tuple(lay[i] for lay in nus))
            for x in range(n):
                for a in range(u):
                    P[i, x, a] = problem.transition(t, x, a, nu)
                    R[i, x, a] = problem.reward(t, x, a, nu)
        return P, R

    return tab


def tables_at(problem: MfgProblem, t: int, nus: Sequence[np.ndarray]):
    """Transition and reward tables at time t for all grid points, given the
    per-layer neighborhood mean fields stacked over grid points."""
    if problem.tabulate is not None:
        return problem.tabulate(t, nus)
    return _generic_tabulate(problem)(t, nus)


def extend_state_space(base: MfgProblem) -> MfgProblem:
    """Lift an action-coupled problem to the state space X + (X x U).

    The base problem's transition/reward must read neighbor (state, action)
    pairs: its nu arrays are indexed by pair indices x * |U| + u.  In the
    extended problem, even epochs deterministically record the taken action
    as a pair state with zero reward; odd epochs apply the base dynamics and
    reward to the pair component, reading neighbors' pair-state mass.  The
    discount becomes the square root of the base discount (odd-epoch rewards
    are rescaled accordingly), and the horizon doubles.
    """
    nb, ub = base.n_states, base.n_actions
    n = nb + nb * ub
    states = list(base.states) + [(x, a) for x in base.states for a in base.actions]
    gamma = math.sqrt(base.gamma)
    reward_scale = base.gamma ** -0.5

    def pair_index(x: int, a: int) -> int:
        return nb + x * ub + a

    def project(nu: NeighborhoodMeanField) -> NeighborhoodMeanField:
        # keep only pair-state mass; bare-state mass is zero at odd epochs
        out = []
        for lay in nu.layers:
            slots = lay.ndim
            block = lay[np.ix_(*([range(nb, n)] * slots))]
            out.append(block.reshape((nb * ub,) * slots))
        return NeighborhoodMeanField(tuple(out))

    def transition(t, x, a, nu):
        e = np.zeros(n)
        if t % 2 == 0:
            e[pair_index(x, a) if x < nb else x] = 1.0
            return e
        if x < nb:
            e[x] = 1.0
            return e
        bx, ba = divmod(x - nb, ub)
        e[:nb] = base.transition(t // 2, bx, ba, project(nu))
        return e

    def reward(t, x, a, nu):
        if t % 2 == 0 or x < nb:
            return 0.0
        bx, ba = divmod(x - nb, ub)
        return reward_scale * base.reward(t // 2, bx, ba, project(nu))

    def mu0(alpha):
        return np.concatenate([np.asarray(base.mu0(alpha), dtype=float), np.zeros(nb * ub)])

    return MfgProblem(states, list(base.actions), 2 * base.T, gamma, mu0,
                      transition, reward, base.layer_cards,
                      name=f"extended({base.name})", params=dict(base.params))


# ---------------------------------------------------------------------------
# Rumor spreading on the extended state space {I, A} + {I, A} x {nS, S}.

RUMOR_STATES = ["I", "A", "I|nS", "I|S", "A|nS", "A|S"]
RUMOR_ACTIONS = ["nS", "S"]
_AS = 5  # pair state (A, S)
_I_BASE = (0, 2, 3)  # states whose base component is ignorant
_A_BASE = (1, 4, 5)  # states whose base component is aware


def _per_layer(value, D: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(D, float(arr))
    if arr.shape != (D,):
        raise ValueError(f"expected scalar or {D} per-layer values")
    return arr


def rumor_problem(tau=(0.3, 0.5), r=0.5, c=0.8, mu0_aware=0.01, T=50,
                  layer_cards=(2, 3), block_init=False, gamma=1.0) -> MfgProblem:
    """Rumor spreading game with spread/stifle incentives.

    Base states are ignorant (I) and aware (A); pair states record the last
    action.  An ignorant agent becomes aware with probability
    min(1, sum_d tau_d * E[# neighbor slots in (A, S)]); awareness is
    absorbing.  An aware, spreading agent earns r_d per expected ignorant
    neighbor slot and pays c_d per aware one (base component in either case).
    With ``block_init`` the rumor starts in all agents with alpha > 0.5.
    """
    D = len(layer_cards)
    tau = _per_layer(tau, D)
    rvec = _per_layer(r, D)
    cvec = _per_layer(c, D)
    if not 0.0 <= mu0_aware <= 1.0:
        raise ValueError("initial awareness must lie in [0, 1]")
    if np.any(tau < 0):
        raise ValueError("infection weights must be nonnegative")

    def infection_prob(nu: NeighborhoodMeanField) -> float:
        total = 0.0
        for tau_d, lay in zip(tau, nu.layers):
            total += tau_d * slot_state_masses(lay)[_AS]
        return min(1.0, total)

    def spread_gain(nu: NeighborhoodMeanField) -> float:
        total = 0.0
        for r_d, c_d, lay in zip(rvec, cvec, nu.layers):
            m = slot_state_masses(lay)
            total += r_d * m[list(_I_BASE)].sum() - c_d * m[list(_A_BASE)].sum()
        return total

    def transition(t, x, a, nu):
        e = np.zeros(6)
        if x in (0, 1):  # base state: record the action
            e[2 + 2 * x + a] = 1.0
        elif x in (4, 5):  # (A, .): stay aware
            e[1] = 1.0
        else:  # (I, .): exposed to spreading aware neighbors
            p = infection_prob(nu)
            e[1] = p
            e[0] = 1.0 - p
        return e

    def reward(t, x, a, nu):
        return spread_gain(nu) if x == _AS else 0.0

    def mu0(alpha):
        if block_init:
            aware = 1.0 if alpha > 0.5 else 0.0
        else:
            aware = mu0_aware
        return np.array([1.0 - aware, aware, 0.0, 0.0, 0.0, 0.0])

    def tab(t, nus):
        M = nus[0].shape[0]
        p_inf = np.zeros(M)
        gain = np.zeros(M)
        for tau_d, r_d, c_d, lay in zip(tau, rvec, cvec, nus):
            m = np.zeros((M, 6))
            for axis in range(1, lay.ndim):
                other = tuple(a for a in range(1, lay.ndim) if a != axis)
                m += lay.sum(axis=other)
            p_inf += tau_d * m[:, _AS]
            gain += r_d * m[:, _I_BASE].sum(axis=1) - c_d * m[:, _A_BASE].sum(axis=1)
        p_inf = np.minimum(1.0, p_inf)
        P = np.zeros((M, 6, 2, 6))
        P[:, 0, 0, 2] = P[:, 0, 1, 3] = P[:, 1, 0, 4] = P[:, 1, 1, 5] = 1.0
        P[:, 4, :, 1] = P[:, 5, :, 1] = 1.0
        for x in (2, 3):
            P[:, x, :, 1] = p_inf[:, None]
            P[:, x, :, 0] = (1.0 - p_inf)[:, None]
        R = np.zeros((M, 6, 2))
        R[:, _AS, :] = gain[:, None]
        return P, R

    return MfgProblem(list(RUMOR_STATES), list(RUMOR_ACTIONS), T, gamma, mu0,
                      transition, reward, tuple(layer_cards), tabulate=tab,
                      name="rumor",
                      params={"tau": tau.tolist(), "r": rvec.tolist(), "c": cvec.tolist(),
                              "mu0_aware": mu0_aware, "block_init": block_init})


# ---------------------------------------------------------------------------
# SIS epidemic with costly precautions.

SIS_STATES = ["S", "I"]
SIS_ACTIONS = ["nP", "P"]


def sis_problem(tau=0.8, delta=0.2, c_p=0.5, c_i=2.0, mu0_infected=0.5, T=50,
                layer_cards=(2, 3), gamma=1.0) -> MfgProblem:
    """SIS epidemic control: susceptible agents may take fully protective,
    costly precautions; infection pressure is linear in the expected number
    of infected neighbor slots; recovery happens at rate delta.  Rewards are
    the negated costs -(c_p 1{u=P} + c_i 1{x=I})."""
    D = len(layer_cards)
    tau = _per_layer(tau, D)
    if not 0.0 < delta < 1.0:
        raise ValueError("recovery rate must lie in (0, 1)")
    if not 0.0 <= mu0_infected <= 1.0:
        raise ValueError("initial infection must lie in [0, 1]")
    if np.any(tau < 0):
        raise ValueError("infection rates must be nonnegative")

    def infection_prob(nu: NeighborhoodMeanField) -> float:
        total = 0.0
        for tau_d, lay in zip(tau, nu.layers):
            total += tau_d * slot_state_masses(lay)[1]
        return min(1.0, total)

    def transition(t, x, a, nu):
        if x == 1:
            return np.array([delta, 1.0 - delta])
        if a == 1:
            return np.array([1.0, 0.0])
        p = infection_prob(nu)
        return np.array([1.0 - p, p])

    def reward(t, x, a, nu):
        return -(c_p * (a == 1) + c_i * (x == 1))

    def mu0(alpha):
        return np.array([1.0 - mu0_infected, mu0_infected])

    def tab(t, nus):
        M = nus[0].shape[0]
        p_inf = np.zeros(M)
        for tau_d, lay in zip(tau, nus):
            m = np.zeros((M, 2))
            for axis in range(1, lay.ndim):
                other = tuple(a for a in range(1, lay.ndim) if a != axis)
                m += lay.sum(axis=other)
            p_inf += tau_d * m[:, 1]
        p_inf = np.minimum(1.0, p_inf)
        P = np.zeros((M, 2, 2, 2))
        P[:, 1, :, 0] = delta
        P[:, 1, :, 1] = 1.0 - delta
        P[:, 0, 1, 0] = 1.0
        P[:, 0, 0, 0] = 1.0 - p_inf
        P[:, 0, 0, 1] = p_inf
        R = np.zeros((M, 2, 2))
        R[:, :, 1] -= c_p
        R[:, 1, :] -= c_i
        return P, R

    return MfgProblem(list(SIS_STATES), list(SIS_ACTIONS), T, gamma, mu0,
                      transition, reward, tuple(layer_cards), tabulate=tab,
                      name="sis",
                      params={"tau": tau.tolist(), "delta": delta, "c_p": c_p,
                              "c_i": c_i, "mu0_infected": mu0_infected})
