"""Markov measures on word chains, with a pinned power-iteration kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

POWER_TOL = 1e-13
POWER_MAX_ITER = 100_000


class ReducibleChainError(RuntimeError):
    """The transition graph is not irreducible; components are attached."""

    def __init__(self, components: list[list[Any]]):
        super().__init__(
            f"chain is reducible: {len(components)} strongly connected components"
        )
        self.components = components


@dataclass
class MarkovMeasure:
    """A shift-invariant Markov measure on a finite word chain.

    ``states`` are the chain states (typically level-l words); ``pi`` is the
    stationary law, ``P`` the transition matrix.  ``provenance`` records how
    the measure arose: ``parry``, ``equilibrium``, ``constructed`` or
    ``pushforward-average``.
    """

    states: list[Any]
    pi: np.ndarray
    P: np.ndarray  # dense ndarray or scipy.sparse matrix for large chains
    provenance: str
    log_lambda: float = 0.0

    def entropy(self) -> float:
        if hasattr(self.P, "tocoo"):
            coo = self.P.tocoo()
            vals = coo.data
            mask = vals > 0
            return float(
                -np.sum(
                    self.pi[coo.row[mask]] * vals[mask] * np.log(vals[mask])
                )
            )
        mask = self.P > 0
        rows = np.repeat(self.pi[:, None], self.P.shape[1], axis=1)
        return float(-np.sum(rows[mask] * self.P[mask] * np.log(self.P[mask])))

    def integrate(self, values: Sequence[float]) -> float:
        return float(np.dot(self.pi, np.asarray(values, dtype=float)))


def strongly_connected_components(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Kosaraju's algorithm on an adjacency-list digraph."""
    n = len(adj)
    order: list[int] = []
    seen = [False] * n
    for s in range(n):
        if seen[s]:
            continue
        stack = [(s, iter(adj[s]))]
        seen[s] = True
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, iter(adj[v])))
                    advanced = True
                    break
            if not advanced:
                order.append(u)
                stack.pop()
    radj: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            radj[v].append(u)
    comp = [-1] * n
    ncomp = 0
    for s in reversed(order):
        if comp[s] != -1:
            continue
        stack = [s]
        comp[s] = ncomp
        while stack:
            u = stack.pop()
            for v in radj[u]:
                if comp[v] == -1:
                    comp[v] = ncomp
                    stack.append(v)
        ncomp += 1
    out: list[list[int]] = [[] for _ in range(ncomp)]
    for u in range(n):
        out[comp[u]].append(u)
    return out


def _power_iterate(W: np.ndarray) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a nonnegative matrix, all-ones start."""
    n = W.shape[0]
    v = np.ones(n)
    lam = 1.0
    for _ in range(POWER_MAX_ITER):
        w = W @ v
        lam_new = float(np.max(w)) if np.max(w) > 0 else 0.0
        if lam_new == 0.0:
            raise ReducibleChainError([[i] for i in range(n)])
        w = w / lam_new
        if np.max(np.abs(w - v)) < POWER_TOL and abs(lam_new - lam) < POWER_TOL * max(
            1.0, lam
        ):
            return lam_new, w
        v, lam = w, lam_new
    raise RuntimeError("power iteration did not converge")


def equilibrium_markov(
    states: list[Any],
    adj: Sequence[Sequence[int]],
    log_weights: Sequence[float],
    provenance: str,
) -> MarkovMeasure:
    """Equilibrium (Gibbs/Parry) Markov measure for state weights e^{phi(u)}.

    Edge u -> v carries weight e^{phi(u)}; the stationary measure of the
    normalized chain is the equilibrium state of the induced potential.
    Raises ReducibleChainError when the chain is not irreducible.
    """
    n = len(states)
    comps = strongly_connected_components(adj)
    if len(comps) != 1:
        raise ReducibleChainError([[states[i] for i in c] for c in comps])
    W = np.zeros((n, n))
    logw = np.asarray(log_weights, dtype=float)
    shift = float(np.max(logw))
    for u in range(n):
        for v in adj[u]:
            W[u, v] = np.exp(logw[u] - shift)
    lam, h = _power_iterate(W)
    _, nu = _power_iterate(W.T)
    # refine the eigenvalue with a Rayleigh-style quotient for symmetry
    lam = float(nu @ W @ h / (nu @ h))
    P = np.zeros((n, n))
    for u in range(n):
        for v in adj[u]:
            P[u, v] = W[u, v] * h[v] / (lam * h[u])
    P = P / P.sum(axis=1, keepdims=True)
    pi = nu * h
    pi = pi / pi.sum()
    return MarkovMeasure(
        states=list(states),
        pi=pi,
        P=P,
        provenance=provenance,
        log_lambda=float(np.log(lam) + shift),
    )
