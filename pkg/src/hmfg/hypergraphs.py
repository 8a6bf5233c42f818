"""Finite multi-layer uniform hypergraphs: sampling from hypergraphons,
incidence queries, and JSON (de)serialization."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .kernels import MultiLayerHypergraphon, nonsingleton_proper_subsets

__all__ = ["HypergraphLayer", "MultiLayerHypergraph", "sample", "incident_tuples"]


@dataclass
class HypergraphLayer:
    """One k-uniform edge set; rows of ``edges`` are sorted and unique."""

    k: int
    edges: np.ndarray  # (E, k) int64

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, self.k)
        e = np.sort(e, axis=1)
        if e.size and np.any(e[:, 1:] == e[:, :-1]):
            raise ValueError("hyperedge with repeated vertices")
        if e.size and len(np.unique(e, axis=0)) != len(e):
            raise ValueError("duplicate hyperedges within a layer")
        if e.size:
            e = e[np.lexsort(e.T[::-1])]
        self.edges = e


@dataclass
class MultiLayerHypergraph:
    N: int
    alphas: np.ndarray
    layers: list[HypergraphLayer]

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=float)
        if self.alphas.shape != (self.N,):
            raise ValueError("need one vertex coordinate per vertex")
        if self.alphas.size and (self.alphas.min() < 0 or self.alphas.max() > 1):
            raise ValueError("vertex coordinates must lie in [0, 1]")
        for layer in self.layers:
            if layer.edges.size and (layer.edges.min() < 0 or layer.edges.max() >= self.N):
                raise ValueError("edge vertex out of range")

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(layer.k for layer in self.layers)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alphas": self.alphas.tolist(),
            "layers": [{"k": l.k, "edges": l.edges.tolist()} for l in self.layers],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MultiLayerHypergraph":
        layers = [HypergraphLayer(l["k"], np.asarray(l["edges"], dtype=np.int64).reshape(-1, l["k"]))
                  for l in d["layers"]]
        return cls(int(d["N"]), np.asarray(d["alphas"], dtype=float), layers)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "MultiLayerHypergraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _k_subsets(N: int, k: int) -> np.ndarray:
    if k == 2:
        i, j = np.triu_indices(N, 1)
        return np.stack([i, j], axis=1).astype(np.int64)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(N), k)),
        dtype=np.int64,
    )
    return flat.reshape(-1, k)


def sample(W: MultiLayerHypergraphon, N: int, seed, alpha_mode: str = "uniform") -> MultiLayerHypergraph:
    """Sample a finite multi-layer hypergraph from a multi-layer hypergraphon.

    Vertex coordinates are drawn i.i.d. Unif[0,1] (``alpha_mode='uniform'``)
    or fixed at interval midpoints (``'grid'``) and shared across layers.
    Each candidate k_d-subset B is included independently with probability
    W_d evaluated at the vertex coordinates of B plus one fresh uniform per
    non-singleton proper subset of B (drawn lazily per candidate edge).
    """
    if alpha_mode not in ("uniform", "grid"):
        raise ValueError(f"unknown alpha_mode {alpha_mode!r}")
    if N < max(W.cards):
        raise ValueError(f"N={N} below the largest layer cardinality {max(W.cards)}")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    alpha_ss, *layer_ss = ss.spawn(1 + W.D)
    if alpha_mode == "uniform":
        alphas = np.random.default_rng(alpha_ss).random(N)
    else:
        alphas = (np.arange(N) + 0.5) / N

    layers = []
    for layer, child in zip(W.layers, layer_ss):
        rng = np.random.default_rng(child)
        combos = _k_subsets(N, layer.k)
        vcoords = alphas[combos]
        scoords = {s: rng.random(len(combos)) for s in nonsingleton_proper_subsets(layer.k)}
        probs = np.asarray(layer.kernel(vcoords, scoords), dtype=float)
        keep = rng.random(len(combos)) < probs
        layers.append(HypergraphLayer(layer.k, combos[keep]))
    return MultiLayerHypergraph(N, alphas, layers)


def incident_tuples(H: MultiLayerHypergraph, vertex: int, layer: int) -> list[tuple[int, ...]]:
    """All ordered (k-1)-tuples of distinct vertices m with {m} + {vertex}
    a hyperedge of the given layer; each hyperedge contributes (k-1)!
    ordered tuples."""
    if not 0 <= vertex < H.N:
        raise ValueError(f"vertex {vertex} out of range")
    if not 0 <= layer < len(H.layers):
        raise ValueError(f"layer {layer} out of range")
    lay = H.layers[layer]
    out: list[tuple[int, ...]] = []
    for edge in lay.edges:
        if vertex in edge:
            others = [v for v in edge if v != vertex]
            out.extend(itertools.permutations(others))
    return out
