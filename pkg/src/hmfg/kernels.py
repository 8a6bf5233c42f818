"""Hypergraphon layers: built-in kernels, step functions of finite hypergraphs,
and grid discretization.

A layer of cardinality k is a symmetric measurable kernel on coordinates
indexed by the non-empty proper subsets of the k vertex positions, valued in
[0, 1].  All downstream formulas couple the kernel only to vertex-indexed
state distributions, so the non-singleton subset coordinates are integrated
out once (``vertex_marginal``) before discretization.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "HypergraphonLayer",
    "MultiLayerHypergraphon",
    "VertexKernelGrid",
    "BUILTIN_NAMES",
    "builtin",
    "vertex_marginal",
    "discretize",
    "step_hypergraphon",
    "layer_density",
    "as_layer",
    "nonsingleton_proper_subsets",
]


def nonsingleton_proper_subsets(k: int) -> list[tuple[int, ...]]:
    """Proper subsets of {0, ..., k-1} with at least two elements.

    These index the kernel coordinates that carry no vertex identity; for
    k = 2 the list is empty, for k = 3 it holds the three pairs.
    """
    out: list[tuple[int, ...]] = []
    for size in range(2, k):
        out.extend(itertools.combinations(range(k), size))
    return out


@dataclass(frozen=True)
class HypergraphonLayer:
    """One k-uniform layer, given as an evaluable kernel.

    ``kernel(vertex_coords, subset_coords)`` takes vertex coordinates of
    shape (..., k) and a dict mapping each non-singleton proper subset
    (a sorted tuple of vertex positions) to an array broadcastable to the
    leading shape, and returns values in [0, 1].  It must be invariant under
    relabeling of the k vertex positions (with subset coordinates permuted
    accordingly).

    ``vertex_kernel``, when given, is the analytic integral of the kernel
    over all non-singleton subset coordinates, as a function of the vertex
    coordinates alone.  Without it, ``vertex_marginal`` falls back to seeded
    Monte Carlo with ``mc_samples`` draws per evaluation point.
    """

    k: int
    kernel: Callable
    vertex_kernel: Optional[Callable] = None
    mc_samples: int = 4096
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("layer cardinality must be at least 2")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be positive")


@dataclass(frozen=True)
class MultiLayerHypergraphon:
    """Ordered tuple of layers sharing the vertex coordinate space."""

    layers: tuple[HypergraphonLayer, ...]

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValueError("need at least one layer")

    @property
    def D(self) -> int:
        return len(self.layers)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(layer.k for layer in self.layers)


@dataclass(frozen=True)
class VertexKernelGrid:
    """Subset-marginalized kernel values on the midpoint grid.

    ``values`` has shape (M,) * k, entries in [0, 1], and is permutation
    symmetric; entry (i_1, ..., i_k) is the marginal kernel at the interval
    midpoints ((i_j + 0.5) / M).
    """

    k: int
    M: int
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.shape != (self.M,) * self.k:
            raise ValueError(f"grid shape {v.shape} does not match M={self.M}, k={self.k}")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("grid entries must lie in [0, 1]")


BUILTIN_NAMES = ("unif2", "rank2", "flat2", "ind3", "unif3", "inv_unif3", "block3", "rank3")


def _checked_p(params: dict, name: str) -> float:
    if "p" not in params:
        raise ValueError(f"kernel '{name}' requires parameter p")
    p = float(params["p"])
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parameter p={p} outside [0, 1]")
    return p


def _pair_indicator(subset_coords, p, base_shape):
    pairs = np.stack([np.broadcast_to(subset_coords[s], base_shape)
                      for s in ((0, 1), (0, 2), (1, 2))], axis=-1)
    return np.all(pairs <= p, axis=-1)


def _block_mask(v):
    return np.all(v <= 0.5, axis=-1) | np.all(v > 0.5, axis=-1)


def builtin(name: str, params: Optional[dict] = None) -> HypergraphonLayer:
    """Construct a built-in (hyper)graphon layer by name.

    2-uniform: ``unif2`` (uniform attachment, 1 - max), ``rank2`` (ranked
    attachment, 1 - a1*a2), ``flat2`` (constant p).  3-uniform: ``ind3``
    (triangles of a p-ER graph), ``unif3``, ``inv_unif3``, ``block3``
    (two-block with pair-coordinate threshold p), and ``rank3``
    (1 - a1*a2*a3, the ranked-attachment analogue).  All built-ins carry
    analytic vertex marginals.
    """
    params = dict(params or {})

    if name == "unif2":
        f = lambda v: 1.0 - np.max(v, axis=-1)
        return HypergraphonLayer(2, lambda v, s: f(np.asarray(v)), vertex_kernel=f, name=name)
    if name == "rank2":
        f = lambda v: 1.0 - v[..., 0] * v[..., 1]
        return HypergraphonLayer(2, lambda v, s: f(np.asarray(v)), vertex_kernel=f, name=name)
    if name == "flat2":
        p = _checked_p(params, name)
        f = lambda v: np.full(np.asarray(v).shape[:-1], p)
        return HypergraphonLayer(2, lambda v, s: f(v), vertex_kernel=f,
                                 name=name, params={"p": p})
    if name == "ind3":
        p = _checked_p(params, name)

        def kern(v, s):
            v = np.asarray(v)
            return _pair_indicator(s, p, v.shape[:-1]).astype(float)

        return HypergraphonLayer(3, kern,
                                 vertex_kernel=lambda v: np.full(np.asarray(v).shape[:-1], p ** 3),
                                 name=name, params={"p": p})
    if name == "unif3":
        f = lambda v: 1.0 - np.max(v, axis=-1)
        return HypergraphonLayer(3, lambda v, s: f(np.asarray(v)), vertex_kernel=f, name=name)
    if name == "inv_unif3":
        f = lambda v: 1.0 - np.max(1.0 - np.asarray(v), axis=-1)
        return HypergraphonLayer(3, lambda v, s: f(v), vertex_kernel=f, name=name)
    if name == "rank3":
        f = lambda v: 1.0 - v[..., 0] * v[..., 1] * v[..., 2]
        return HypergraphonLayer(3, lambda v, s: f(np.asarray(v)), vertex_kernel=f, name=name)
    if name == "block3":
        p = _checked_p(params, name)

        def kern(v, s):
            v = np.asarray(v)
            ok = _block_mask(v) & _pair_indicator(s, p, v.shape[:-1])
            return ok.astype(float)

        def vk(v):
            return p ** 3 * _block_mask(np.asarray(v)).astype(float)

        return HypergraphonLayer(3, kern, vertex_kernel=vk, name=name, params={"p": p})

    raise ValueError(f"unknown kernel name: {name!r}")


def _point_seed(point: np.ndarray, seed: int) -> np.random.SeedSequence:
    # Keyed by the *sorted* coordinates so that permuted evaluation points
    # share one Monte-Carlo stream; this makes discretized grids bitwise
    # permutation symmetric.
    canon = np.ascontiguousarray(np.sort(point), dtype=np.float64)
    h = hashlib.blake2b(canon.tobytes(), digest_size=16, person=b"hmfg-marg")
    words = np.frombuffer(h.digest(), dtype=np.uint32)
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *map(int, words)])


def vertex_marginal(layer: HypergraphonLayer, vertex_coords, method: str = "auto",
                    seed: int = 0) -> np.ndarray:
    """Integrate the kernel over all non-singleton subset coordinates.

    ``vertex_coords`` has shape (..., k).  With ``method='auto'`` the analytic
    marginal is used when the layer has one, else Monte Carlo with the
    layer's sample count and a deterministic per-point stream derived from
    ``seed`` and the sorted coordinates.
    """
    vc = np.asarray(vertex_coords, dtype=float)
    if vc.shape[-1] != layer.k:
        raise ValueError(f"expected {layer.k} vertex coordinates, got {vc.shape[-1]}")
    if method not in ("auto", "analytic", "monte_carlo"):
        raise ValueError(f"unknown method {method!r}")
    if method == "analytic" or (method == "auto" and layer.vertex_kernel is not None):
        if layer.vertex_kernel is None:
            raise ValueError("layer has no analytic vertex marginal")
        return np.asarray(layer.vertex_kernel(vc), dtype=float)

    subs = nonsingleton_proper_subsets(layer.k)
    if not subs:
        return np.asarray(layer.kernel(vc, {}), dtype=float)
    flat = vc.reshape(-1, layer.k)
    out = np.empty(len(flat))
    for idx, point in enumerate(flat):
        rng = np.random.default_rng(_point_seed(point, seed))
        draws = {s: rng.random(layer.mc_samples) for s in subs}
        pts = np.broadcast_to(point, (layer.mc_samples, layer.k))
        out[idx] = float(np.mean(layer.kernel(pts, draws)))
    return out.reshape(vc.shape[:-1])


def discretize(layer: HypergraphonLayer, M: int, seed: int = 0) -> VertexKernelGrid:
    """Evaluate the vertex marginal on the k-fold midpoint grid.

    Coordinates are sorted before evaluation, so the resulting tensor is
    bitwise permutation symmetric for any symmetric kernel.
    """
    if M < 1:
        raise ValueError("grid resolution must be at least 1")
    mids = (np.arange(M) + 0.5) / M
    mesh = np.meshgrid(*([mids] * layer.k), indexing="ij")
    coords = np.sort(np.stack(mesh, axis=-1), axis=-1)
    flat = coords.reshape(-1, layer.k)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    vals = vertex_marginal(layer, uniq, seed=seed)
    values = np.clip(vals[inverse].reshape((M,) * layer.k), 0.0, 1.0)
    return VertexKernelGrid(layer.k, M, values)


def step_hypergraphon(H, layer_index: int) -> VertexKernelGrid:
    """Step function of one layer of a finite hypergraph: grid at M = N with
    entry 1 exactly at index tuples forming a hyperedge (all orderings), and
    0 elsewhere, including tuples with repeated vertices."""
    if not 0 <= layer_index < len(H.layers):
        raise ValueError(f"layer index {layer_index} out of range")
    layer = H.layers[layer_index]
    k = layer.k
    values = np.zeros((H.N,) * k)
    for edge in layer.edges:
        for perm in itertools.permutations(edge):
            values[perm] = 1.0
    return VertexKernelGrid(k, H.N, values)


def layer_density(grid: VertexKernelGrid) -> float:
    """Mean grid value over index tuples with pairwise-distinct entries."""
    idx = np.indices(grid.values.shape)
    mask = np.ones(grid.values.shape, dtype=bool)
    for a, b in itertools.combinations(range(grid.k), 2):
        mask &= idx[a] != idx[b]
    if not mask.any():
        return 0.0
    return float(grid.values[mask].mean())


def as_layer(grid: VertexKernelGrid) -> HypergraphonLayer:
    """Wrap a grid as a piecewise-constant layer (intervals closed on the
    right, matching the subinterval convention i/M as rightmost point)."""
    M, values = grid.M, grid.values

    def lookup(v):
        idx = np.clip(np.ceil(np.asarray(v) * M).astype(int) - 1, 0, M - 1)
        return values[tuple(np.moveaxis(idx, -1, 0))]

    return HypergraphonLayer(grid.k, lambda v, s: lookup(v), vertex_kernel=lookup,
                             name="step", params={"M": M})
