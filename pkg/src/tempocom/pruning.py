"""Multi-scale eigenvalue precomputation, composite/group lower bounds, pruning."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .graph import Interval, NormalizationConfig, TemporalGraph, aggregate, eta
from .spectral import DEFAULT_TOL, EigResult, EigenSolveError, lambda2

STATUS_GROUP_PRUNED = "group-pruned"
STATUS_COMPOSITE_PRUNED = "composite-pruned"
STATUS_UNPRUNED = "unpruned"
STATUS_PROBED = "probed"

PRUNED_STATUSES = frozenset({STATUS_GROUP_PRUNED, STATUS_COMPOSITE_PRUNED})


@dataclass(frozen=True)
class PruningGroup:
    """Intervals [start, t*] for t* in [prefix_end, group_end], sharing the
    prefix [start, prefix_end]."""

    start: int
    prefix_end: int
    group_end: int

    def members(self):
        return [Interval(self.start, t) for t in range(self.prefix_end, self.group_end + 1)]


class PruneVerdict(NamedTuple):
    interval: Interval
    status: str
    bound_value: float


def _levels(T: int, base: int) -> list[int]:
    """Block lengths base**i for i = 0 .. ceil(log_base(T))."""
    top = max(0, math.ceil(math.log(T, base))) if T > 1 else 0
    return [base ** i for i in range(top + 1)]


class BoundsTable:
    """Precomputed lambda2 at exponentially scaled aligned blocks, plus O(1)
    node-volume interval queries via prefix sums."""

    def __init__(self, g: TemporalGraph, scale_base: int,
                 entries: dict[Interval, Optional[EigResult]]):
        self.g = g
        self.scale_base = scale_base
        self.T = g.T
        self.entries = entries
        self.volume_prefix = g.node_volume_prefix()
        self._lengths_desc = sorted(_levels(g.T, scale_base), reverse=True)
        self._decomp_cache: dict[Interval, tuple[Interval, ...]] = {}
        self._block_vol_cache: dict[tuple[int, int], np.ndarray] = {}

    def node_volumes(self, start: int, end: int) -> np.ndarray:
        return self.volume_prefix[:, end + 1] - self.volume_prefix[:, start]

    def block_volumes(self, block: Interval) -> np.ndarray:
        """node_volumes for precomputed blocks, cached (O(T) distinct blocks)."""
        key = (block.start, block.end)
        vols = self._block_vol_cache.get(key)
        if vols is None:
            vols = self._block_vol_cache[key] = self.node_volumes(block.start,
                                                                  block.end)
        return vols

    def block_lambda2(self, block: Interval) -> float:
        """0 for unusable entries: a vacuous but sound contribution."""
        res = self.entries.get(block)
        return 0.0 if res is None else res.lambda2

    def decompose(self, iv: Interval) -> tuple[Interval, ...]:
        """Canonical decomposition: greedily take the largest aligned usable
        block fitting in the remainder. Level-0 blocks always fit, so this
        terminates with <= 2(l-1)*ceil(log_l T) blocks."""
        cached = self._decomp_cache.get(iv)
        if cached is not None:
            return cached
        blocks: list[Interval] = []
        pos = iv.start
        while pos <= iv.end:
            chosen = None
            for length in self._lengths_desc:
                if pos % length != 0:
                    continue
                block = Interval(pos, min(pos + length, self.T) - 1)
                if block.end > iv.end:
                    continue
                if length > 1 and block not in self.entries:
                    continue
                if length > 1 and self.entries[block] is None:
                    continue  # unusable entry: split finer
                chosen = block
                break
            assert chosen is not None
            blocks.append(chosen)
            pos = chosen.end + 1
        out = tuple(blocks)
        self._decomp_cache[iv] = out
        return out


def precompute(g: TemporalGraph, l: int = 2, tol: float = DEFAULT_TOL,
               threads: int = 1) -> BoundsTable:
    """Eigensolve all aligned blocks at scales l**i (O(T) solves total).

    Blocks whose eigensolve fails are kept as unusable entries; composite
    bounds route around them by splitting finer.
    """
    if l < 2:
        raise ValueError("scale base must be >= 2")
    blocks: list[Interval] = []
    seen = set()
    for length in _levels(g.T, l):
        for start in range(0, g.T, length):
            block = Interval(start, min(start + length, g.T) - 1)
            if block not in seen:
                seen.add(block)
                blocks.append(block)

    def solve(block: Interval) -> Optional[EigResult]:
        try:
            return lambda2(aggregate(g, block), tol)
        except EigenSolveError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, blocks))
    else:
        results = [solve(b) for b in blocks]
    return BoundsTable(g, l, dict(zip(blocks, results)))


def composite_lambda2_bound(bt: BoundsTable, iv: Interval) -> float:
    """Lower bound on lambda2 of the interval's aggregated graph, assembled
    from precomputed block eigenvalues weighted by min node-volume ratios.

    Nodes with zero interval volume also have zero block volume, so excluding
    them from the min is exact, not just conservative.
    """
    vol_iv = bt.node_volumes(iv.start, iv.end)
    active = vol_iv > 0
    if not active.any():
        return 0.0
    inv = 1.0 / vol_iv[active]
    total = 0.0
    for block in bt.decompose(iv):
        lam = bt.block_lambda2(block)
        if lam <= 0.0:
            continue
        ratios = bt.block_volumes(block)[active] * inv
        total += float(ratios.min()) * lam
    return total


def composite_bound(bt: BoundsTable, iv: Interval,
                    cfg: NormalizationConfig) -> float:
    """eta(iv) times the composite lambda2 bound."""
    return eta(iv, cfg) * composite_lambda2_bound(bt, iv)


def build_groups(T: int, beta: float) -> list[PruningGroup]:
    """Geometric ladder of shared-prefix groups per start time.

    Members of one group are the intervals [t, t*] with span between the
    prefix span and the group span; spans grow by roughly 1/beta between
    groups, so there are O(log_{1/beta} T) groups per start. Span-0 intervals
    are not grouped (they are precomputed level-0 blocks).
    """
    if not (0 < beta < 1):
        raise ValueError("beta must be in (0, 1)")
    groups: list[PruningGroup] = []
    for t in range(T):
        s = 1
        while t + s <= T - 1:
            widest = max(s, math.floor(s / beta) - 1)
            end_span = min(widest, T - 1 - t)
            groups.append(PruningGroup(t, t + s, t + end_span))
            s = end_span + 1
    return groups


def group_bound(bt: BoundsTable, grp: PruningGroup,
                cfg: NormalizationConfig) -> float:
    """Bound shared by every member [t, t*], t* in [prefix_end, group_end]:
    prefix blocks in the numerator, whole-group volumes in the denominator,
    and the whole-group eta."""
    whole = Interval(grp.start, grp.group_end)
    vol_whole = bt.node_volumes(whole.start, whole.end)
    active = vol_whole > 0
    if not active.any():
        return 0.0
    inv = 1.0 / vol_whole[active]
    total = 0.0
    for block in bt.decompose(Interval(grp.start, grp.prefix_end)):
        lam = bt.block_lambda2(block)
        if lam <= 0.0:
            continue
        ratios = bt.block_volumes(block)[active] * inv
        total += float(ratios.min()) * lam
    return eta(whole, cfg) * total


def _half(x: float) -> float:
    # all pruning comparisons fold in the Cheeger 1/2 so the bounds stay
    # sound against actual conductance values
    return x / 2.0


def prune_all(bt: BoundsTable, groups: list[PruningGroup], phi_star: float,
              cfg: NormalizationConfig,
              use_groups: bool = True) -> list[PruneVerdict]:
    """Verdict for every interval: group test first, survivors tested with
    their own composite bound. Comparisons are strict so an interval whose
    bound exactly equals the incumbent (possible when the spectral bound is
    tight) is never discarded. Monotone in phi_star."""
    if not (phi_star > 0) or math.isinf(phi_star):
        raise ValueError("phi_star must be a finite positive incumbent conductance")
    T = bt.T
    # verdicts land at offsets[start] + (end - start), already in
    # (start, end) order, so no final sort is needed
    offsets = [0] * T
    acc = 0
    for t in range(T):
        offsets[t] = acc
        acc += T - t
    out: list = [None] * acc

    for t in range(T):
        iv = Interval(t, t)
        cb = _half(composite_bound(bt, iv, cfg))
        status = STATUS_COMPOSITE_PRUNED if cb > phi_star else STATUS_UNPRUNED
        out[offsets[t]] = PruneVerdict(iv, status, cb)

    for grp in groups:
        gb = _half(group_bound(bt, grp, cfg)) if use_groups else -math.inf
        base = offsets[grp.start] - grp.start
        if gb > phi_star:
            start = grp.start
            out[base + grp.prefix_end:base + grp.group_end + 1] = [
                PruneVerdict(Interval(start, end), STATUS_GROUP_PRUNED, gb)
                for end in range(grp.prefix_end, grp.group_end + 1)]
            continue
        for end in range(grp.prefix_end, grp.group_end + 1):
            iv = Interval(grp.start, end)
            cb = _half(composite_bound(bt, iv, cfg))
            status = STATUS_COMPOSITE_PRUNED if cb > phi_star else STATUS_UNPRUNED
            out[base + end] = PruneVerdict(iv, status, cb)

    return out
