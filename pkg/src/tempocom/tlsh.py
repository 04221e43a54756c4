"""Time-and-graph locality-sensitive hashing of weighted temporal neighborhoods."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import TemporalGraph

DEFAULT_BUCKET_CAP = 4096


def weighted_jaccard(a: Mapping[int, float], b: Mapping[int, float]) -> float:
    """Ratio of per-key min-sums to max-sums; absent keys count as weight 0."""
    if not a and not b:
        raise ValueError("both weighted sets are empty")
    num = 0.0
    den = 0.0
    for key in set(a) | set(b):
        wa = a.get(key, 0.0)
        wb = b.get(key, 0.0)
        num += min(wa, wb)
        den += max(wa, wb)
    return num / den


@dataclass(frozen=True)
class TemporalNeighborhood:
    """Weighted neighbor set of (node, timestamp), including the node itself
    with its volume at that timestamp."""

    node: int
    timestamp: int
    weights: Mapping[int, float]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        keys = np.fromiter(self.weights.keys(), dtype=np.int64)
        vals = np.fromiter(self.weights.values(), dtype=np.float64)
        return keys, vals


def temporal_neighborhood(g: TemporalGraph, u: int, t: int) -> TemporalNeighborhood:
    snap = g.weights[:, t]
    w: dict[int, float] = {}
    for e in np.flatnonzero(((g.edge_u == u) | (g.edge_v == u)) & (snap > 0)):
        v = int(g.edge_v[e]) if g.edge_u[e] == u else int(g.edge_u[e])
        w[v] = float(snap[e])
    vol = sum(w.values())
    if vol <= 0:
        raise ValueError(f"node {u} has no interactions at t={t}")
    w[u] = vol
    return TemporalNeighborhood(node=u, timestamp=t, weights=w)


_MIX = np.uint64(0x9E3779B97F4A7C15)


def _pack64(keys: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Mix (key, quantized level) samples into 64-bit values; equality of the
    packed value coincides with equality of the sample pair."""
    k = keys.astype(np.uint64)
    lv = levels.astype(np.int64).astype(np.uint64)
    x = (k << np.uint64(32)) ^ (lv & np.uint64(0xFFFFFFFF))
    x = (x ^ (x >> np.uint64(30))) * _MIX
    return x ^ (x >> np.uint64(27))


class WeightedMinHasher:
    """Consistent weighted sampling: r independent functions whose single-
    function collision probability equals the weighted Jaccard similarity."""

    def __init__(self, r: int, dim: int, seed):
        if r < 1 or dim < 1:
            raise ValueError("r and dim must be positive")
        rng = np.random.default_rng(seed)
        self.r = r
        self.dim = dim
        self.gammas = rng.gamma(2.0, 1.0, (r, dim))
        self.ln_cs = np.log(rng.gamma(2.0, 1.0, (r, dim)))
        self.betas = rng.uniform(0.0, 1.0, (r, dim))

    def sample(self, keys: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One (key, quantized level) sample per function."""
        if len(keys) == 0:
            raise ValueError("empty weighted set")
        g = self.gammas[:, keys]
        b = self.betas[:, keys]
        t = np.floor(np.log(weights)[None, :] / g + b)
        ln_a = self.ln_cs[:, keys] - g * (t - b) - g
        idx = np.argmin(ln_a, axis=1)
        rows = np.arange(self.r)
        return keys[idx], t[rows, idx].astype(np.int64)

    def sample_segments(self, keys: np.ndarray, weights: np.ndarray,
                        starts: np.ndarray, seg_len: np.ndarray,
                        ) -> tuple[np.ndarray, np.ndarray]:
        """Batched sample() over many weighted sets laid out contiguously.

        Row-for-row identical to calling sample() per segment: the same
        elementwise formulas, and ties resolve to the first index within the
        segment. Returns (keys, levels) of shape (n_segments, r).
        """
        g = self.gammas[:, keys]
        b = self.betas[:, keys]
        t = np.floor(np.log(weights)[None, :] / g + b)
        ln_a = self.ln_cs[:, keys] - g * (t - b) - g
        mins = np.minimum.reduceat(ln_a, starts, axis=1)
        expanded = np.repeat(mins, seg_len, axis=1)
        n = ln_a.shape[1]
        cols = np.arange(n)
        cand = np.where(ln_a == expanded, cols, n)
        idx = np.minimum.reduceat(cand, starts, axis=1)
        rows = np.arange(self.r)[:, None]
        return keys[idx].T, t[rows, idx].astype(np.int64).T

    def hash(self, nbhd: TemporalNeighborhood) -> np.ndarray:
        """r packed 64-bit minhash values."""
        keys, vals = nbhd.arrays()
        skeys, levels = self.sample(keys, vals)
        return _pack64(skeys, levels)


class TemporalPivotHasher:
    """Maps a timestamp to the index of the earliest of k random pivots at or
    after it (1-based; sentinel k+1 when none)."""

    def __init__(self, k: int, T: int, seed):
        if k < 1:
            raise ValueError("need at least one pivot")
        rng = np.random.default_rng(seed)
        self.k = k
        self.T = T
        self.pivots = np.sort(rng.uniform(0.0, T, k))

    def pivot_hash(self, t: float) -> int:
        i = int(np.searchsorted(self.pivots, t, side="left"))
        return i + 1 if i < self.k else self.k + 1


def optimal_pivots(delta_star: int, T: int) -> int:
    """Pivot count maximizing the chance of bracketing a period of the given
    length with two pivots: floor(2T / delta*), clamped to >= 2."""
    if not (1 <= delta_star <= T):
        raise ValueError("target duration must be in [1, T]")
    return max(2, (2 * T) // delta_star)


@dataclass(frozen=True)
class CompositeSignature:
    """AND of one pivot index and r weighted-minhash values within a band."""

    scale: int
    band: int
    time_part: int
    graph_part: tuple[int, ...]
    graph_keys: tuple[int, ...] = field(compare=False)

    def sort_key(self):
        return (self.scale, self.band, self.time_part, self.graph_part)

    def packed_key(self, n_nodes: int, k: int) -> int:
        """Compact integer of the pivot index and the sampled vertex ids,
        fitting in ceil(log2((k+2) * n^r)) bits."""
        acc = self.time_part
        for key in self.graph_keys:
            acc = acc * n_nodes + key
        return acc


@dataclass
class Bucket:
    key: CompositeSignature
    entries: list[tuple[int, int]]

    @property
    def span(self) -> tuple[int, int]:
        ts = [t for _, t in self.entries]
        return (min(ts), max(ts))

    @property
    def fill_factor(self) -> float:
        nodes = {u for u, _ in self.entries}
        times = {t for _, t in self.entries}
        return len(self.entries) / (len(nodes) * len(times))

    def sort_key(self):
        """Descending consistency, then size; deterministic tail on the key."""
        return (-self.fill_factor, -len(self.entries), self.key.sort_key())


def sort_buckets(buckets: Iterable[Bucket]) -> list[Bucket]:
    out = sorted(buckets, key=Bucket.sort_key)
    for b in out:
        b.entries.sort()
    return out


def scale_ladder(T: int) -> list[int]:
    """Geometric scales 1, 2, 4, ... up to T // 2 (at least scale 1)."""
    scales = [1]
    while scales[-1] * 2 <= max(1, T // 2):
        scales.append(scales[-1] * 2)
    return scales


def _eligible_timestamps(T: int, intervals, s: int) -> np.ndarray:
    """Timestamps t such that some interval intersects [t - s, t + s]."""
    diff = np.zeros(T + 1, dtype=np.int64)
    for iv in intervals:
        lo = max(0, iv.start - s)
        hi = min(T - 1, iv.end + s)
        diff[lo] += 1
        diff[hi + 1] -= 1
    return np.cumsum(diff[:-1]) > 0


def _split_oversized(bucket: Bucket, cap: int) -> list[Bucket]:
    if len(bucket.entries) <= cap:
        return [bucket]
    ts = sorted(t for _, t in bucket.entries)
    median = ts[len(ts) // 2]
    lo = [e for e in bucket.entries if e[1] < median]
    hi = [e for e in bucket.entries if e[1] >= median]
    if not lo or not hi:  # all entries share one timestamp; nothing to split
        return [bucket]
    out = []
    for part in (lo, hi):
        out.extend(_split_oversized(Bucket(bucket.key, part), cap))
    return out


def hash_all(g: TemporalGraph, intervals, scales: Sequence[int], r: int, b: int,
             seed: int, bucket_cap: int = DEFAULT_BUCKET_CAP,
             min_entries: int = 2) -> list[Bucket]:
    """Hash every (node, timestamp) near an unpruned interval at every scale.

    For scale s the pivot count targets durations up to 2s (an unpruned
    interval inside the window [t-s, t+s] can be that long). All b bands of
    one scale share a single hasher with b*r rows; rows are independent, so
    slicing them per band preserves the banding law.
    """
    intervals = list(intervals)
    # keyed by (scale, band, time_part, packed-row bytes): cheaper to build
    # than signature objects, which are materialized only for kept buckets
    tables: dict[tuple, list[tuple[int, int]]] = {}
    key_rows: dict[tuple, bytes] = {}
    if not intervals:
        return []

    # flat incidence arrays grouped by node so one timestamp's neighborhoods
    # can be hashed for every node in a single batch of array ops
    owner = np.concatenate([g.edge_u, g.edge_v])
    inc_keys = np.concatenate([g.edge_v, g.edge_u])
    inc_eids = np.concatenate([np.arange(g.n_edges)] * 2)
    order = np.argsort(owner, kind="stable")
    owner, inc_keys, inc_eids = owner[order], inc_keys[order], inc_eids[order]
    degree = np.bincount(owner, minlength=g.n) if len(owner) else np.zeros(g.n, int)

    for s in scales:
        elig = _eligible_timestamps(g.T, intervals, s)
        if not elig.any():
            continue
        k = optimal_pivots(min(2 * s, g.T), g.T)
        graph_hasher = WeightedMinHasher(b * r, g.n, seed=[seed, s, 0])
        pivot_hashers = [TemporalPivotHasher(k, g.T, seed=[seed, s, 1, j])
                         for j in range(b)]
        for t in np.flatnonzero(elig):
            t = int(t)
            snap = g.weights[:, t]
            time_parts = [ph.pivot_hash(t) for ph in pivot_hashers]
            w = snap[inc_eids]
            live = w > 0
            keys_l, owner_l, w_l = inc_keys[live], owner[live], w[live]
            if len(owner_l) == 0:
                continue
            vols = np.bincount(owner_l, weights=w_l, minlength=g.n)
            active = np.flatnonzero(vols > 0)
            # per node: its live neighbor keys followed by the self key, the
            # same layout a per-node loop would build
            deg_l = np.bincount(owner_l, minlength=g.n)
            seg_len = deg_l[active] + 1
            starts = np.zeros(len(active), dtype=np.int64)
            np.cumsum(seg_len[:-1], out=starts[1:])
            total = int(seg_len.sum())
            keys = np.empty(total, dtype=np.int64)
            vals = np.empty(total, dtype=np.float64)
            self_pos = starts + seg_len - 1
            keys[self_pos] = active
            vals[self_pos] = vols[active]
            mask = np.ones(total, dtype=bool)
            mask[self_pos] = False
            keys[mask] = keys_l
            vals[mask] = w_l
            skeys, levels = graph_hasher.sample_segments(keys, vals, starts, seg_len)
            packed = _pack64(skeys, levels)
            width = 8 * r
            nodes = active.tolist()
            for j in range(b):
                gp = np.ascontiguousarray(packed[:, j * r:(j + 1) * r]).tobytes()
                gk = np.ascontiguousarray(skeys[:, j * r:(j + 1) * r]).tobytes()
                tp = time_parts[j]
                for i, u in enumerate(nodes):
                    lo = i * width
                    key = (s, j, tp, gp[lo:lo + width])
                    lst = tables.get(key)
                    if lst is None:
                        tables[key] = [(u, t)]
                        key_rows[key] = gk[lo:lo + width]
                    else:
                        lst.append((u, t))

    buckets = []
    for key, entries in tables.items():
        if len(entries) < min_entries:
            continue
        s_, j_, tp_, gp_bytes = key
        sig = CompositeSignature(
            scale=s_, band=j_, time_part=tp_,
            graph_part=tuple(int(x) for x in np.frombuffer(gp_bytes, np.uint64)),
            graph_keys=tuple(int(x) for x in np.frombuffer(key_rows[key], np.int64)),
        )
        buckets.extend(_split_oversized(Bucket(sig, entries), bucket_cap))
    return sort_buckets(buckets)


# ---------------------------------------------------------------------------
# Monte Carlo helpers shared by the calibration CLI and the property suite.

def minhash_collision_count(wa: Mapping[int, float], wb: Mapping[int, float],
                            trials: int, seed) -> int:
    """Single-function collisions over independent hasher draws.

    One hasher with `trials` rows supplies the independent functions.
    """
    keys = sorted(set(wa) | set(wb))
    remap = {key: i for i, key in enumerate(keys)}
    ka = np.array([remap[x] for x in wa], dtype=np.int64)
    kb = np.array([remap[x] for x in wb], dtype=np.int64)
    va = np.fromiter(wa.values(), dtype=np.float64)
    vb = np.fromiter(wb.values(), dtype=np.float64)
    hasher = WeightedMinHasher(trials, len(keys), seed)
    sa = hasher.sample(ka, va)
    sb = hasher.sample(kb, vb)
    return int(np.sum((sa[0] == sb[0]) & (sa[1] == sb[1])))


def perfect_partition_counts(delta_star: int, T: int, ks, trials: int,
                             seed) -> dict[int, int]:
    """Monte Carlo counts of perfect partitions for each pivot count.

    A draw is perfect when a pivot lands in each unit-width bracket slot
    flanking a centered period of the target length and no pivot falls
    strictly inside it. All pivot counts share the same uniform draws
    (prefix columns), so comparisons across counts use common random numbers.
    """
    ks = sorted(set(int(k) for k in ks))
    if min(ks) < 2:
        raise ValueError("need at least two pivots to bracket a period")
    if not (1 <= delta_star <= T - 2):
        raise ValueError("period plus bracket slots must fit in the timeline")
    rng = np.random.default_rng(seed)
    s = (T - delta_star) / 2.0
    u = rng.uniform(0.0, T, (trials, max(ks)))
    out = {}
    for k in ks:
        uk = u[:, :k]
        left = ((uk >= s - 1.0) & (uk <= s)).any(axis=1)
        right = ((uk >= s + delta_star) & (uk <= s + delta_star + 1.0)).any(axis=1)
        inside = ((uk > s) & (uk < s + delta_star)).any(axis=1)
        out[k] = int(np.sum(left & right & ~inside))
    return out


def pivot_collision_count(t: float, t2: float, T: int, k: int,
                          trials: int, seed) -> int:
    """Pivot-index collisions over independent pivot draws."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, T, (trials, k))
    ca = (u < t).sum(axis=1)
    cb = (u < t2).sum(axis=1)
    return int(np.sum(ca == cb))


def composite_collision_count(wa: Mapping[int, float], wb: Mapping[int, float],
                              dt: int, T: int, r: int, k: int,
                              trials: int, seed) -> int:
    """Full composite-signature collisions: all r minhash rows AND the pivot
    index must agree."""
    keys = sorted(set(wa) | set(wb))
    remap = {key: i for i, key in enumerate(keys)}
    ka = np.array([remap[x] for x in wa], dtype=np.int64)
    kb = np.array([remap[x] for x in wb], dtype=np.int64)
    va = np.fromiter(wa.values(), dtype=np.float64)
    vb = np.fromiter(wb.values(), dtype=np.float64)
    hasher = WeightedMinHasher(trials * r, len(keys), [seed, 0])
    sa = hasher.sample(ka, va)
    sb = hasher.sample(kb, vb)
    graph_eq = ((sa[0] == sb[0]) & (sa[1] == sb[1])).reshape(trials, r).all(axis=1)

    rng = np.random.default_rng([seed, 1])
    t = rng.integers(0, T - dt + 1, trials).astype(np.float64)
    u = rng.uniform(0.0, T, (trials, k))
    time_eq = (u < t[:, None]).sum(axis=1) == (u < (t + dt)[:, None]).sum(axis=1)
    return int(np.sum(graph_eq & time_eq))
