"""End-to-end detection: precompute, estimate, prune, hash, refine, rank."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .graph import (Interval, NormalizationConfig, TemporalCommunity,
                    TemporalGraph, aggregate, eta)
from .pruning import (BoundsTable, PruneVerdict, STATUS_PROBED, STATUS_UNPRUNED,
                      build_groups, composite_bound, precompute, prune_all)
from .refine import WalkParams, refine_bucket, rwr_scores, sweep
from .spectral import DEFAULT_TOL
from .tlsh import hash_all, scale_ladder

ESTIMATE_ROWS = 2
ESTIMATE_BANDS = 2


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.0
    scale_base: int = 2
    beta: float = 0.5
    rows: int = 4
    bands: int = 4
    topk: int = 10
    probes: int = 5
    seed: int = 0
    threads: int = 1
    eig_tol: float = DEFAULT_TOL
    walk: WalkParams = WalkParams()
    use_groups: bool = True
    min_entries: int = 2
    span_cap: float = 2.0

    def norm(self) -> NormalizationConfig:
        return NormalizationConfig(self.alpha)


@dataclass
class BucketDecision:
    """One refinement-loop decision, for post-hoc guard audits."""
    interval: Interval
    bound_half: float
    phi_star_before: float
    refined: bool


@dataclass
class DetectionState:
    phi_star: float
    communities: list[TemporalCommunity]
    verdicts: list[PruneVerdict]
    config: RunConfig
    bucket_log: list[BucketDecision] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def _add_candidate(results: dict, cand: TemporalCommunity) -> None:
    if math.isfinite(cand.phi):
        results[(cand.nodes, cand.interval)] = cand


def _fallback_sweep(g: TemporalGraph, cfg: RunConfig,
                    n_seeds: int = 5) -> TemporalCommunity | None:
    """Singleton-seed sweeps from the highest-volume nodes of the fully
    aggregated graph; the estimate of last resort."""
    ag = aggregate(g, g.full_interval())
    order = np.argsort(-ag.volumes, kind="stable")
    best = None
    for seed in order[:n_seeds]:
        if ag.volumes[seed] <= 0:
            break
        scores = rwr_scores(ag, [int(seed)], cfg.walk)
        norm = np.zeros(g.n)
        pos = ag.volumes > 0
        norm[pos] = scores[pos] / ag.volumes[pos]
        ranking = sorted(np.flatnonzero(pos).tolist(), key=lambda u: (-norm[u], u))
        try:
            nodes, _, phi = sweep(ag, ranking, cfg.norm())
        except ValueError:
            continue
        cand = TemporalCommunity(nodes=nodes, interval=ag.interval, phi=phi)
        if best is None or cand.sort_key() < best.sort_key():
            best = cand
    return best


def estimate_initial(g: TemporalGraph, bt: BoundsTable, cfg: RunConfig,
                     ) -> tuple[float, list[TemporalCommunity], list[Interval]]:
    """Probe the precomputed blocks of smallest normalized spectral bound with
    light hashing; fall back to a static sweep when probing yields nothing."""
    norm = cfg.norm()
    scored = []
    for iv, res in bt.entries.items():
        if res is None:
            continue
        scored.append((eta(iv, norm) * res.lambda2 / 2.0, iv.start, iv.end, iv))
    scored.sort()
    probes = [item[3] for item in scored[:cfg.probes]]

    candidates: list[TemporalCommunity] = []
    for iv in probes:
        scale = max(1, iv.length)
        buckets = hash_all(g, [iv], scales=[scale], r=ESTIMATE_ROWS,
                           b=ESTIMATE_BANDS, seed=cfg.seed)
        if not buckets:
            continue
        try:
            result = refine_bucket(g, buckets[0].entries, norm, cfg.walk)
        except (ValueError, RuntimeError):
            continue
        if math.isfinite(result.community.phi):
            candidates.append(result.community)

    if not candidates:
        fb = _fallback_sweep(g, cfg)
        if fb is not None:
            candidates.append(fb)
    if not candidates:
        raise ValueError("no initial estimate could be formed (empty graph?)")
    candidates.sort(key=TemporalCommunity.sort_key)
    return candidates[0].phi, candidates, probes


def detect(g: TemporalGraph, cfg: RunConfig) -> DetectionState:
    """Run the full pipeline and return ranked communities plus verdicts."""
    norm = cfg.norm()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    bt = precompute(g, cfg.scale_base, cfg.eig_tol, threads=cfg.threads)
    timings["precompute"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    phi_star, initial, probes = estimate_initial(g, bt, cfg)
    timings["estimate"] = time.perf_counter() - t0

    results: dict = {}
    for cand in initial:
        _add_candidate(results, cand)

    t0 = time.perf_counter()
    if phi_star > 0:
        groups = build_groups(g.T, cfg.beta)
        verdicts = prune_all(bt, groups, phi_star, norm, use_groups=cfg.use_groups)
    else:
        # a zero-conductance community is globally optimal already; nothing
        # left to search
        verdicts = [PruneVerdict(Interval(t, t2), STATUS_UNPRUNED, 0.0)
                    for t in range(g.T) for t2 in range(t, g.T)]
    probe_set = set(probes)
    verdicts = [
        v._replace(status=STATUS_PROBED)
        if v.status == STATUS_UNPRUNED and v.interval in probe_set else v
        for v in verdicts
    ]
    timings["prune"] = time.perf_counter() - t0

    bucket_log: list[BucketDecision] = []
    if phi_star > 0:
        open_intervals = [v.interval for v in verdicts
                          if v.status in (STATUS_UNPRUNED, STATUS_PROBED)]
        t0 = time.perf_counter()
        buckets = hash_all(g, open_intervals, scale_ladder(g.T),
                           r=cfg.rows, b=cfg.bands, seed=cfg.seed,
                           min_entries=cfg.min_entries)
        timings["hash"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        seen_seedings: set = set()
        agg_cache: dict[Interval, object] = {}
        bound_cache: dict[Interval, float] = {}
        for bucket in buckets:
            lo, hi = bucket.span
            # entries spanning far beyond the hashing scale collide by chance,
            # not because a community persists there; skip them
            if hi - lo + 1 > cfg.span_cap * bucket.key.scale:
                continue
            iv = Interval(lo, hi)
            # refinement depends on a bucket only through its span and node
            # multiplicities, so collapse equivalent buckets across bands
            counts = Counter(u for u, _ in bucket.entries)
            seed_key = (iv, tuple(sorted(counts.items())))
            if seed_key in seen_seedings:
                continue
            seen_seedings.add(seed_key)
            bound_half = bound_cache.get(iv)
            if bound_half is None:
                bound_half = bound_cache[iv] = composite_bound(bt, iv, norm) / 2.0
            if bound_half >= phi_star:
                bucket_log.append(BucketDecision(iv, bound_half, phi_star, False))
                continue
            bucket_log.append(BucketDecision(iv, bound_half, phi_star, True))
            ag = agg_cache.get(iv)
            if ag is None:
                ag = agg_cache[iv] = aggregate(g, iv)
            try:
                result = refine_bucket(g, bucket.entries, norm, cfg.walk, ag=ag)
            except (ValueError, RuntimeError):
                continue
            cand = result.community
            _add_candidate(results, cand)
            if cand.phi < phi_star:
                phi_star = cand.phi
        timings["refine"] = time.perf_counter() - t0

    ranked = sorted(results.values(), key=TemporalCommunity.sort_key)[:cfg.topk]
    best_phi = ranked[0].phi if ranked else math.inf
    return DetectionState(phi_star=min(phi_star, best_phi), communities=ranked,
                          verdicts=verdicts, config=cfg,
                          bucket_log=bucket_log, timings=timings)
