"""Temporal graph data model, interval aggregation and temporal conductance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

INFINITE_CONDUCTANCE = math.inf

# Timelines longer than this get per-edge prefix-sum arrays so interval
# aggregation is O(1) per edge instead of O(interval length).
PREFIX_SUM_THRESHOLD = 64


class GraphFormatError(ValueError):
    """Raised for malformed temporal edge-list input."""


class _IntervalBase(NamedTuple):
    start: int
    end: int


class Interval(_IntervalBase):
    """Closed timestamp interval [start, end]."""

    __slots__ = ()

    def __new__(cls, start: int, end: int):
        if not 0 <= start <= end:
            raise ValueError(f"invalid interval [{start}, {end}]")
        return tuple.__new__(cls, (start, end))

    @property
    def length(self) -> int:
        """Number of timestamps covered (duration)."""
        return self.end - self.start + 1

    @property
    def span(self) -> int:
        """end - start."""
        return self.end - self.start

    def contains(self, other: "Interval") -> bool:
        return self.start <= other.start and other.end <= self.end

    def intersects(self, other: "Interval") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class NormalizationConfig:
    """Power-law duration normalization with exponent alpha >= 0."""

    alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


def eta(iv: Interval, cfg: NormalizationConfig) -> float:
    """Duration normalization factor max(1, span)**(-alpha).

    The max(1, .) keeps single-timestamp intervals (span 0) finite; for all
    multi-step intervals this is the plain power law.
    """
    if cfg.alpha == 0.0:
        return 1.0
    return float(max(1, iv.span)) ** (-cfg.alpha)


class TemporalGraph:
    """Immutable undirected edge-weighted temporal graph.

    Edges are canonical pairs (u < v) over dense node ids 0..n-1; weights are
    stored per (edge, timestamp) in a dense (m, T) array with 0 meaning "no
    interaction". External node labels are kept for output.
    """

    def __init__(self, labels: Sequence[str], timeline: int,
                 edge_u: np.ndarray, edge_v: np.ndarray, weights: np.ndarray):
        n = len(labels)
        if timeline < 1:
            raise ValueError("timeline length must be >= 1")
        edge_u = np.asarray(edge_u, dtype=np.int64)
        edge_v = np.asarray(edge_v, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(edge_u), timeline):
            raise ValueError("weights must have shape (n_edges, T)")
        if np.any(edge_u >= edge_v):
            raise ValueError("edges must be canonical pairs with u < v")
        if len(edge_u) and (edge_u.min() < 0 or edge_v.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(weights < 0):
            raise ValueError("negative weights are not allowed")

        self.labels = tuple(str(x) for x in labels)
        self.label_index = {lab: i for i, lab in enumerate(self.labels)}
        self.n = n
        self.T = timeline
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.weights = weights
        if timeline > PREFIX_SUM_THRESHOLD:
            cum = np.zeros((len(edge_u), timeline + 1), dtype=np.float64)
            np.cumsum(weights, axis=1, out=cum[:, 1:])
            self._cum = cum
        else:
            self._cum = None
        for arr in (self.edge_u, self.edge_v, self.weights):
            arr.setflags(write=False)
        if self._cum is not None:
            self._cum.setflags(write=False)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    @classmethod
    def from_records(cls, labels: Sequence[str], timeline: int,
                     records: Iterable[tuple[int, int, int, float]]) -> "TemporalGraph":
        """Build from (u, v, t, w) records over dense node ids.

        Duplicate (u, v, t) records are merged by summing weights.
        """
        n = len(labels)
        merged: dict[tuple[int, int], dict[int, float]] = {}
        for u, v, t, w in records:
            if u == v:
                raise GraphFormatError(f"self-loop on node {labels[u]!r}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"node id out of range: ({u}, {v})")
            if not (0 <= t < timeline):
                raise GraphFormatError(
                    f"timestamp {t} outside declared timeline [0, {timeline - 1}]")
            if not (w > 0):
                raise GraphFormatError(f"non-positive weight {w}")
            key = (u, v) if u < v else (v, u)
            merged.setdefault(key, {})
            merged[key][t] = merged[key].get(t, 0.0) + w
        edges = sorted(merged)
        edge_u = np.array([e[0] for e in edges], dtype=np.int64)
        edge_v = np.array([e[1] for e in edges], dtype=np.int64)
        weights = np.zeros((len(edges), timeline), dtype=np.float64)
        for i, e in enumerate(edges):
            for t, w in merged[e].items():
                weights[i, t] = w
        return cls(labels, timeline, edge_u, edge_v, weights)

    def interval_edge_weights(self, iv: Interval) -> np.ndarray:
        """Aggregate weight per edge over [iv.start, iv.end]."""
        self._check_interval(iv)
        if self._cum is not None:
            return self._cum[:, iv.end + 1] - self._cum[:, iv.start]
        return self.weights[:, iv.start:iv.end + 1].sum(axis=1)

    def node_volume_prefix(self) -> np.ndarray:
        """(n, T+1) cumulative node volumes; vol(u, a, b) = P[u, b+1] - P[u, a]."""
        per_t = np.zeros((self.n, self.T), dtype=np.float64)
        np.add.at(per_t, self.edge_u, self.weights)
        np.add.at(per_t, self.edge_v, self.weights)
        out = np.zeros((self.n, self.T + 1), dtype=np.float64)
        np.cumsum(per_t, axis=1, out=out[:, 1:])
        return out

    def _check_interval(self, iv: Interval) -> None:
        if iv.end >= self.T:
            raise ValueError(f"interval {iv} exceeds timeline length {self.T}")

    def full_interval(self) -> Interval:
        return Interval(0, self.T - 1)


@dataclass(frozen=True)
class AggregatedGraph:
    """Interval-aggregated weighted graph with cached volumes."""

    interval: Interval
    n: int
    adjacency: sp.csr_matrix = field(compare=False)
    volumes: np.ndarray = field(compare=False)

    @property
    def total_volume(self) -> float:
        return float(self.volumes.sum())


def aggregate(g: TemporalGraph, iv: Interval) -> AggregatedGraph:
    """Aggregate edge weights over iv; edges with zero aggregate are dropped."""
    s = g.interval_edge_weights(iv)
    keep = s > 0
    u, v, w = g.edge_u[keep], g.edge_v[keep], s[keep]
    adj = sp.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
        shape=(g.n, g.n),
    )
    volumes = np.asarray(adj.sum(axis=1)).ravel()
    volumes.setflags(write=False)
    return AggregatedGraph(interval=iv, n=g.n, adjacency=adj, volumes=volumes)


@dataclass(frozen=True)
class TemporalCommunity:
    """A node set with its activity interval and temporal conductance."""

    nodes: frozenset[int]
    interval: Interval
    phi: float

    def sort_key(self):
        """Deterministic ranking key: (phi, |C|, nodes, interval)."""
        return (self.phi, len(self.nodes), tuple(sorted(self.nodes)),
                self.interval.start, self.interval.end)


def cut_and_volumes(g: TemporalGraph, members: np.ndarray,
                    iv: Interval) -> tuple[float, float, float]:
    """Cut weight and the two side volumes of a membership mask over iv."""
    s = g.interval_edge_weights(iv)
    in_u = members[g.edge_u]
    in_v = members[g.edge_v]
    cut = float(s[in_u != in_v].sum())
    vol_c = float(s[in_u].sum() + s[in_v].sum())
    total = 2.0 * float(s.sum())
    return cut, vol_c, total - vol_c


def conductance(g: TemporalGraph, c: Iterable[int], iv: Interval,
                cfg: NormalizationConfig) -> float:
    """Temporal conductance eta * cut / min(vol(C), vol(complement)).

    A zero min-volume yields the infinite sentinel (worst possible) so search
    code can skip such sets without special-casing.
    """
    members = np.zeros(g.n, dtype=bool)
    idx = np.fromiter(c, dtype=np.int64)
    if len(idx) == 0 or len(np.unique(idx)) >= g.n:
        raise ValueError("C must be a nonempty proper subset of V")
    members[idx] = True
    cut, vol_c, vol_cbar = cut_and_volumes(g, members, iv)
    denom = min(vol_c, vol_cbar)
    if denom <= 0:
        return INFINITE_CONDUCTANCE
    return eta(iv, cfg) * cut / denom


def load(path) -> TemporalGraph:
    """Parse the temporal edge-list text format.

    First non-comment line: ``tgraph <n_nodes> <T>``; then one record per
    line ``<u> <v> <t> <w>``. ``#`` starts a comment. Node tokens are opaque
    strings mapped to dense ids in order of first appearance; ids for labels
    never seen in records are still allocated up to the declared node count.
    """
    header = None
    records = []
    labels: list[str] = []
    index: dict[str, int] = {}

    def node_id(tok: str, lineno: int, limit: int) -> int:
        if tok not in index:
            if len(labels) >= limit:
                raise GraphFormatError(
                    f"line {lineno}: more node labels than declared ({limit})")
            index[tok] = len(labels)
            labels.append(tok)
        return index[tok]

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 3 or parts[0] != "tgraph":
                    raise GraphFormatError(
                        f"line {lineno}: expected header 'tgraph <n_nodes> <T>'")
                try:
                    header = (int(parts[1]), int(parts[2]))
                except ValueError as exc:
                    raise GraphFormatError(f"line {lineno}: bad header counts") from exc
                if header[0] < 1 or header[1] < 1:
                    raise GraphFormatError(f"line {lineno}: counts must be positive")
                continue
            if len(parts) != 4:
                raise GraphFormatError(
                    f"line {lineno}: expected '<u> <v> <t> <w>', got {line!r}")
            n_nodes, timeline = header
            try:
                t = int(parts[2])
                w = float(parts[3])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: bad timestamp or weight") from exc
            if parts[0] == parts[1]:
                raise GraphFormatError(f"line {lineno}: self-loop on {parts[0]!r}")
            if not (0 <= t < timeline):
                raise GraphFormatError(
                    f"line {lineno}: timestamp {t} outside [0, {timeline - 1}]")
            if not (w > 0):
                raise GraphFormatError(f"line {lineno}: non-positive weight {w}")
            u = node_id(parts[0], lineno, n_nodes)
            v = node_id(parts[1], lineno, n_nodes)
            records.append((u, v, t, w))

    if header is None:
        raise GraphFormatError("missing 'tgraph' header line")
    n_nodes, timeline = header
    filler = 0
    while len(labels) < n_nodes:
        while str(filler) in index:
            filler += 1
        index[str(filler)] = len(labels)
        labels.append(str(filler))
    return TemporalGraph.from_records(labels, timeline, records)
