"""Normalized Laplacian spectra of aggregated graphs and the Cheeger-style bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.linalg as sla
from scipy.sparse.csgraph import connected_components

from .graph import AggregatedGraph, NormalizationConfig, eta

DEFAULT_TOL = 1e-8


class EigenSolveError(RuntimeError):
    """Lanczos failed to converge within the iteration cap."""


@dataclass(frozen=True)
class EigResult:
    lambda2: float
    residual: float
    iterations: int


def normalized_laplacian(ag: AggregatedGraph) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
    """Symmetric normalized Laplacian restricted to positive-volume nodes.

    Returns (N, support_index, sqrt_volumes_on_support). Zero-volume nodes
    have no well-defined D^{-1/2} entry and are treated as their own
    components by the caller.
    """
    support = np.flatnonzero(ag.volumes > 0)
    adj = ag.adjacency[support][:, support].tocsr()
    vols = ag.volumes[support]
    dinv = 1.0 / np.sqrt(vols)
    norm_adj = sp.diags(dinv) @ adj @ sp.diags(dinv)
    lap = sp.identity(len(support), format="csr") - norm_adj
    return lap.tocsr(), support, np.sqrt(vols)


def component_count(ag: AggregatedGraph) -> int:
    """Connected components of the aggregated graph, isolated nodes included."""
    support = np.flatnonzero(ag.volumes > 0)
    isolated = ag.n - len(support)
    if len(support) == 0:
        return ag.n
    adj = ag.adjacency[support][:, support]
    k = connected_components(adj, directed=False, return_labels=False)
    return int(k) + isolated


def _lanczos_smallest(matvec, n: int, deflate: np.ndarray, tol: float,
                      max_iter: int, rng: np.random.Generator) -> tuple[float, np.ndarray, int]:
    """Smallest eigenpair of a symmetric operator on the subspace orthogonal
    to ``deflate``, via Lanczos with full reorthogonalization."""
    d = deflate / np.linalg.norm(deflate)
    v = rng.standard_normal(n)
    v -= (d @ v) * d
    nv = np.linalg.norm(v)
    if nv == 0:
        raise EigenSolveError("degenerate start vector")
    v /= nv

    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    theta = np.nan
    ritz = None
    for it in range(1, max_iter + 1):
        w = matvec(basis[-1])
        alphas.append(float(basis[-1] @ w))
        # full reorthogonalization (twice) against the basis and the deflated
        # nullvector; instance sizes are modest so the O(n * it) cost is fine
        for _ in range(2):
            w -= (d @ w) * d
            for q in basis:
                w -= (q @ w) * q
        beta = float(np.linalg.norm(w))
        alpha_arr = np.array(alphas)
        beta_arr = np.array(betas)
        vals, vecs = sla.eigh_tridiagonal(alpha_arr, beta_arr)
        theta = float(vals[0])
        s = vecs[:, 0]
        resid_est = abs(beta * s[-1])
        # the Krylov space orthogonal to d has dimension n - 1; exhausting it
        # means the tridiagonal eigenvalue is exact
        if resid_est <= tol or beta <= 1e-14 or it >= n - 1:
            ritz = np.column_stack(basis) @ s
            return theta, ritz, it
        betas.append(beta)
        basis.append(w / beta)
    raise EigenSolveError(f"no convergence after {max_iter} iterations")


def lambda2(ag: AggregatedGraph, tol: float = DEFAULT_TOL,
            seed: int | None = None) -> EigResult:
    """Second-smallest eigenvalue of the normalized Laplacian.

    Disconnected aggregated graphs (counting isolated zero-volume nodes as
    components) return lambda2 = 0 exactly without running the solver.
    """
    if ag.n < 2:
        raise ValueError("need at least 2 nodes")
    if component_count(ag) > 1:
        return EigResult(lambda2=0.0, residual=0.0, iterations=0)

    lap, support, dsqrt = normalized_laplacian(ag)
    ns = len(support)
    if seed is None:
        seed = 0x5eed ^ (ag.interval.start * 1_000_003 + ag.interval.end)
    rng = np.random.default_rng(seed)
    theta, x, its = _lanczos_smallest(
        lambda v: lap @ v, ns, dsqrt, tol, max_iter=10 * ns, rng=rng)
    res = float(np.linalg.norm(lap @ x - theta * x) / np.linalg.norm(x))
    return EigResult(lambda2=max(theta, 0.0), residual=res, iterations=its)


def lambda2_dense(ag: AggregatedGraph) -> float:
    """Dense eigendecomposition oracle for the same quantity (small n only)."""
    if component_count(ag) > 1:
        return 0.0
    lap, _, _ = normalized_laplacian(ag)
    vals = np.linalg.eigvalsh(lap.toarray())
    return float(vals[1])


def cheeger_lower_bound(ag: AggregatedGraph, cfg: NormalizationConfig,
                        tol: float = DEFAULT_TOL) -> float:
    """eta(interval) * lambda2 / 2, a lower bound on any subset's conductance."""
    return eta(ag.interval, cfg) * lambda2(ag, tol).lambda2 / 2.0
