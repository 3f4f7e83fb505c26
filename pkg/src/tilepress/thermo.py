"""Thermodynamics of word potentials: pressure, Gibbs ratios, rate functions.

A *potential* here is a function of the first l letters of a symbol sequence,
with exact rational values.  Birkhoff sums over an n-tile are only pinned by
the word on the windows that fit inside it; the machinery below tracks the
exact part plus min/max over the unseen tail, which yields computable
distortion constants and honest pressure brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from tilepress import cells
from tilepress.cells import Word
from tilepress.measures import MarkovMeasure, equilibrium_markov
from tilepress.rule import SubdivisionRule


@dataclass(frozen=True)
class Potential:
    """Level-l word potential with exact rational values (default 0)."""

    level: int
    values: Mapping[Word, Fraction]

    def value(self, word: Word) -> Fraction:
        if len(word) < self.level:
            raise ValueError("word shorter than potential level")
        return self.values.get(tuple(word[: self.level]), Fraction(0))

    def __call__(self, word: Word) -> float:
        return float(self.value(word))

    def scaled(self, c) -> "Potential":
        c = Fraction(c)
        return Potential(
            level=self.level,
            values={w: c * v for w, v in self.values.items()},
        )


def zero_potential() -> Potential:
    return Potential(level=1, values={})


def indicator_potential(
    rule: SubdivisionRule, tiles: Sequence[str] | None = None
) -> Potential:
    """Indicator of one marked 1-tile in each face.

    Marking one tile per location makes the indicator see every admissible
    continuation with the same one-in-(d) frequency, so its free energy on
    the full shift has the clean closed form log((d-1+e^t)/d) + log(2d)/...
    (for lattes-2x2: pressure log(3+e^t) at inverse temperature t).
    """
    idx = rule.index
    if tiles is None:
        chosen = []
        for locn in (0, 1):
            cand = min(t for t in range(idx.n_tiles) if idx.loc[t] == locn)
            chosen.append(cand)
    else:
        chosen = [idx.tile_pos[t] for t in tiles]
        locs = {idx.loc[t] for t in chosen}
        if len(chosen) != 2 or locs != {0, 1}:
            raise ValueError("indicator tiles must be one per location")
    return Potential(level=1, values={(t,): Fraction(1) for t in chosen})


# ---------------------------------------------------------------------------
# word chains


def word_chain(
    rule: SubdivisionRule, level: int
) -> tuple[list[Word], dict[Word, int], list[list[int]]]:
    """States (level-words), positions, and shift adjacency."""
    idx = rule.index
    states = list(cells.enumerate_tiles(rule, level))
    pos = {s: i for i, s in enumerate(states)}
    adj: list[list[int]] = []
    for s in states:
        if level == 1:
            adj.append([t for t in idx.successors[idx.col[s[0]]]])
        else:
            adj.append(
                [
                    pos[s[1:] + (t,)]
                    for t in idx.successors[idx.col[s[-1]]]
                    if s[1:] + (t,) in pos
                ]
            )
    return states, pos, adj


# ---------------------------------------------------------------------------
# Birkhoff brackets and distortion


def _tail_extremes(
    rule: SubdivisionRule, phi: Potential, suffix: Word
) -> tuple[Fraction, Fraction]:
    """Min/max of the sum of the incomplete windows ending past ``suffix``.

    ``suffix`` is the last min(n, l-1) letters of a word; the returned
    extremes range over admissible continuations of length l-1.
    """
    idx = rule.index
    ell = phi.level
    windows = len(suffix)  # windows starting inside the suffix
    lo: Fraction | None = None
    hi: Fraction | None = None

    def rec(ext: Word, depth: int) -> None:
        nonlocal lo, hi
        if depth == ell - 1:
            full = suffix + ext
            total = sum(
                (phi.value(full[i : i + ell]) for i in range(windows)),
                Fraction(0),
            )
            lo = total if lo is None or total < lo else lo
            hi = total if hi is None or total > hi else hi
            return
        last = (suffix + ext)[-1]
        for t in idx.successors[idx.col[last]]:
            rec(ext + (t,), depth + 1)

    rec((), 0)
    assert lo is not None and hi is not None
    return lo, hi


def birkhoff_bracket(
    rule: SubdivisionRule, phi: Potential, word: Word
) -> tuple[Fraction, Fraction]:
    """Exact [min, max] of the Birkhoff sum S_n phi over the n-tile ``word``."""
    n, ell = len(word), phi.level
    exact = Fraction(0)
    for i in range(max(0, n - ell + 1)):
        exact += phi.value(word[i : i + ell])
    suffix = word[max(0, n - ell + 1) :]
    lo, hi = _tail_extremes(rule, phi, suffix)
    return exact + lo, exact + hi


def birkhoff_midpoint(rule: SubdivisionRule, phi: Potential, word: Word) -> Fraction:
    lo, hi = birkhoff_bracket(rule, phi, word)
    return (lo + hi) / 2


def distortion(rule: SubdivisionRule, phi: Potential, n: int) -> Fraction:
    """Exact sup over n-tiles of the Birkhoff bracket width.

    Bounded by (l-1)(max phi - min phi); for n >= l it only depends on the
    possible (l-1)-letter suffixes.
    """
    ell = phi.level
    if n >= ell:
        best = Fraction(0)
        suffix_len = ell - 1
        if suffix_len == 0:
            return Fraction(0)
        for s in cells.enumerate_tiles(rule, suffix_len):
            lo, hi = _tail_extremes(rule, phi, s)
            best = max(best, hi - lo)
        return best
    best = Fraction(0)
    for w in cells.enumerate_tiles(rule, n):
        lo, hi = birkhoff_bracket(rule, phi, w)
        best = max(best, hi - lo)
    return best


# ---------------------------------------------------------------------------
# pressure


@dataclass
class PressureEstimate:
    method: str
    value: float
    bracket: tuple[float, float]
    n: int | None = None


def spectral_pressure(rule: SubdivisionRule, phi: Potential) -> PressureEstimate:
    """Topological pressure as log of the transfer-operator eigenvalue."""
    states, _, adj = word_chain(rule, phi.level)
    logw = [phi(s) for s in states]
    mm = equilibrium_markov(states, adj, logw, provenance="equilibrium")
    return PressureEstimate(
        method="spectral", value=mm.log_lambda, bracket=(mm.log_lambda,) * 2
    )


def partition_pressure(
    rule: SubdivisionRule, phi: Potential, n: int
) -> PressureEstimate:
    """Pressure bracket from the n-th partition sums over tile brackets.

    Z_n^- and Z_n^+ sum e^{S_n phi} over n-tiles using the min/max Birkhoff
    bracket; the reported bracket widens both by log(#states)/n to absorb
    the finite-n eigenvector spread.
    """
    ell = phi.level
    if n < ell:
        raise ValueError("n must be at least the potential level")
    states, _, adj = word_chain(rule, ell)
    k = len(states)
    logw = np.array([phi(s) for s in states])
    tails = [
        _tail_extremes(rule, phi, s[1:] if ell > 1 else ())
        for s in states
    ]
    # tail state of an n-word is the (l-1)-suffix of its final window
    t_lo = np.array([float(t[0]) for t in tails])
    t_hi = np.array([float(t[1]) for t in tails])
    v = np.exp(logw - logw.max())
    logscale = float(logw.max())
    for _ in range(n - ell):
        nxt = np.zeros(k)
        for u in range(k):
            for w in adj[u]:
                nxt[w] += v[u]
        nxt *= np.exp(logw - logw.max())
        logscale += float(logw.max())
        s = nxt.max()
        v = nxt / s
        logscale += math.log(s)
    z_lo = math.log(float(np.sum(v * np.exp(t_lo - t_lo.max()))) ) + t_lo.max() + logscale
    z_hi = math.log(float(np.sum(v * np.exp(t_hi - t_hi.max()))) ) + t_hi.max() + logscale
    c = math.log(k + 1)
    lo, hi = z_lo / n - c / n, z_hi / n + c / n
    return PressureEstimate(
        method="Zn", value=(z_lo + z_hi) / (2 * n), bracket=(lo, hi), n=n
    )


def pressure(
    rule: SubdivisionRule,
    phi: Potential,
    method: str = "spectral",
    n: int | None = None,
) -> PressureEstimate:
    if method == "spectral":
        return spectral_pressure(rule, phi)
    if method in ("Zn", "partition"):
        if n is None:
            raise ValueError("Zn pressure needs n")
        return partition_pressure(rule, phi, n)
    if method in ("periodic", "preimage"):
        from tilepress import orbits

        if n is None:
            raise ValueError(f"{method} pressure needs n")
        if method == "periodic":
            return orbits.periodic_pressure(rule, phi, n)
        return orbits.preimage_pressure(rule, phi, n)
    raise ValueError(f"unknown pressure method {method!r}")


# ---------------------------------------------------------------------------
# equilibrium states and Gibbs ratios


def equilibrium_state(rule: SubdivisionRule, phi: Potential) -> MarkovMeasure:
    states, _, adj = word_chain(rule, phi.level)
    logw = [phi(s) for s in states]
    provenance = "parry" if not phi.values else "equilibrium"
    return equilibrium_markov(states, adj, logw, provenance)


def cylinder_mass(
    rule: SubdivisionRule, mm: MarkovMeasure, word: Word
) -> float:
    """Equilibrium mass of the n-cylinder of ``word`` (n >= chain level)."""
    ell = len(mm.states[0])
    if len(word) < ell:
        raise ValueError("word shorter than the chain level")
    pos = {s: i for i, s in enumerate(mm.states)}
    us = [pos[tuple(word[i : i + ell])] for i in range(len(word) - ell + 1)]
    p = float(mm.pi[us[0]])
    for a, b in zip(us, us[1:]):
        p *= float(mm.P[a, b])
    return p


@dataclass
class CylinderReport:
    n: int
    masses: dict[cells.TileWord, float]


def equilibrium_cylinders(
    rule: SubdivisionRule,
    phi: Potential,
    n: int,
    words: Iterable[Word] | None = None,
) -> CylinderReport:
    mm = equilibrium_state(rule, phi)
    if words is None:
        words = cells.enumerate_tiles(rule, n)
    masses = {
        cells.word_ids(rule, tuple(w)): cylinder_mass(rule, mm, tuple(w))
        for w in words
    }
    return CylinderReport(n=n, masses=masses)


@dataclass
class GibbsReport:
    n: int
    pressure: float
    min_ratio: float
    max_ratio: float

    @property
    def constant(self) -> bool:
        return abs(self.max_ratio - self.min_ratio) < 1e-12 * max(
            1.0, abs(self.max_ratio)
        )


def gibbs_report(rule: SubdivisionRule, phi: Potential, n: int) -> GibbsReport:
    """Exact range over n-tiles of mu(tile) / e^{-nP + S_n(midpoint)}.

    For a Markov equilibrium state the ratio only depends on the first and
    last chain state of the word, so the extremes come from the reachable
    (start, end) pairs rather than word enumeration.
    """
    ell = phi.level
    if n < ell:
        raise ValueError("n must be at least the potential level")
    mm = equilibrium_state(rule, phi)
    states, _, adj = word_chain(rule, ell)
    k = len(states)
    lam = math.exp(mm.log_lambda)
    # factor from the end state: h(u) e^{-phi(u) - midtail(u)}
    # and from the start state: pi(u)/h(u); total times lambda^l.
    # Recover h from P: P(u,v) = e^{phi(u)} h(v) / (lam h(u)).
    h = np.ones(k)
    # h is determined up to scale by any positive right eigenvector; rebuild it
    W = np.zeros((k, k))
    for u in range(k):
        for v in adj[u]:
            W[u, v] = math.exp(phi(states[u]))
    vals, vecs = np.linalg.eig(W)
    iperron = int(np.argmax(vals.real))
    h = np.abs(vecs[:, iperron].real)
    h = h / h.max()
    start = np.array([float(mm.pi[u]) / h[u] for u in range(k)])
    end = np.zeros(k)
    for u in range(k):
        if ell > 1:
            lo, hi = _tail_extremes(rule, phi, states[u][1:])
        else:
            lo, hi = Fraction(0), Fraction(0)
        mid = float(lo + hi) / 2
        end[u] = h[u] * math.exp(-phi(states[u]) - mid)
    reach = np.eye(k, dtype=bool)
    A = np.zeros((k, k), dtype=bool)
    for u in range(k):
        for v in adj[u]:
            A[u, v] = True
    for _ in range(n - ell):
        reach = reach @ A
    ratios = []
    for u in range(k):
        for v in range(k):
            if reach[u, v]:
                ratios.append(start[u] * end[v] * lam**ell)
    return GibbsReport(
        n=n,
        pressure=mm.log_lambda,
        min_ratio=min(ratios),
        max_ratio=max(ratios),
    )


@dataclass
class MeasureStats:
    entropy: float
    phi_mean: float | None
    psi_mean: float | None
    free_energy: float | None


def measure_stats(
    mm: MarkovMeasure,
    phi: Callable | None = None,
    psi: Callable | None = None,
) -> MeasureStats:
    """Entropy, observable means and free energy of a Markov measure.

    ``phi``/``psi`` are evaluated on the chain states (one window per step).
    """
    h = mm.entropy()
    phim = mm.integrate([phi(s) for s in mm.states]) if phi is not None else None
    psim = mm.integrate([psi(s) for s in mm.states]) if psi is not None else None
    free = h + phim if phim is not None else None
    return MeasureStats(entropy=h, phi_mean=phim, psi_mean=psim, free_energy=free)


# ---------------------------------------------------------------------------
# Legendre rate functions


def _spectral_log_lambda(W: np.ndarray) -> float:
    vals = np.linalg.eigvals(W)
    return float(np.log(np.max(np.abs(vals))))


def _weighted_matrix(
    states: list[Word], adj: list[list[int]], logw: Sequence[float]
) -> np.ndarray:
    k = len(states)
    W = np.zeros((k, k))
    for u in range(k):
        wu = math.exp(logw[u])
        for v in adj[u]:
            W[u, v] = wu
    return W


def _cycle_mean_extremes(
    adj: list[list[int]], vals: Sequence[float]
) -> tuple[float, float]:
    """Min/max average of ``vals`` (on sources) over directed cycles (Karp)."""

    def karp(sign: float) -> float:
        n = len(adj)
        NEG = -math.inf
        d = [[NEG] * n for _ in range(n + 1)]
        for u in range(n):
            d[0][u] = 0.0
        for k in range(1, n + 1):
            for u in range(n):
                if d[k - 1][u] == NEG:
                    continue
                base = d[k - 1][u] + sign * vals[u]
                for v in adj[u]:
                    if base > d[k][v]:
                        d[k][v] = base
        best = NEG
        for v in range(n):
            if d[n][v] == NEG:
                continue
            worst = math.inf
            for k in range(n):
                if d[k][v] == NEG:
                    continue
                worst = min(worst, (d[n][v] - d[k][v]) / (n - k))
            best = max(best, worst)
        return sign * best

    return karp(-1.0), karp(1.0)


@dataclass
class RateFunctionCurve:
    xs: list[float]
    values: list[float]
    mean: float
    domain: tuple[float, float]
    pressure: float
    t_range: tuple[float, float]


def legendre_rate(
    rule: SubdivisionRule,
    phi: Potential,
    psi: Potential,
    xs: Sequence[float],
    t_range: tuple[float, float] = (-60.0, 60.0),
    t_steps: int = 1201,
    refine_iters: int = 80,
) -> RateFunctionCurve:
    """Deviation rate K(x) = sup_t (t x - q(t)), q(t) = P(phi+t psi) - P(phi).

    K is +inf outside the closed interval of achievable cycle means of psi;
    the supremum is taken on a t-grid and then refined by golden-section
    search around the best grid point.
    """
    level = max(phi.level, psi.level)
    states, _, adj = word_chain(rule, level)
    base_logw = [phi(s[: phi.level]) for s in states]
    psi_vals = [psi(s[: psi.level]) for s in states]
    p0 = _spectral_log_lambda(_weighted_matrix(states, adj, base_logw))

    def q(t: float) -> float:
        logw = [b + t * p for b, p in zip(base_logw, psi_vals)]
        return _spectral_log_lambda(_weighted_matrix(states, adj, logw)) - p0

    lo_mean, hi_mean = _cycle_mean_extremes(adj, psi_vals)
    mm = equilibrium_markov(states, adj, base_logw, "equilibrium")
    mean = mm.integrate(psi_vals)

    ts = np.linspace(t_range[0], t_range[1], t_steps)
    qs = np.array([q(t) for t in ts])

    def K(x: float) -> float:
        if x < lo_mean - 1e-12 or x > hi_mean + 1e-12:
            return math.inf
        obj = ts * x - qs
        i = int(np.argmax(obj))
        a = ts[max(0, i - 1)]
        b = ts[min(len(ts) - 1, i + 1)]
        gr = (math.sqrt(5) - 1) / 2
        c, d = b - gr * (b - a), a + gr * (b - a)
        fc, fd = c * x - q(c), d * x - q(d)
        for _ in range(refine_iters):
            if fc < fd:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = d * x - q(d)
            else:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = c * x - q(c)
        return max(float(obj[i]), fc, fd, 0.0)

    values = [K(float(x)) for x in xs]
    return RateFunctionCurve(
        xs=[float(x) for x in xs],
        values=values,
        mean=float(mean),
        domain=(lo_mean, hi_mean),
        pressure=p0,
        t_range=t_range,
    )


def rate_via_entropy_program(
    rule: SubdivisionRule,
    phi: Potential,
    psi: Potential,
    x: float,
) -> float:
    """Independent oracle: K(x) = P(phi) - max{h(mu)+int phi : int psi = x},
    solved as a convex program over stationary edge flows."""
    import cvxpy as cp

    level = max(phi.level, psi.level)
    states, _, adj = word_chain(rule, level)
    k = len(states)
    edges = [(u, v) for u in range(k) for v in adj[u]]
    ne = len(edges)
    Q = cp.Variable(ne, nonneg=True)
    rho = [
        cp.sum(cp.hstack([Q[i] for i, (u, _) in enumerate(edges) if u == s]))
        for s in range(k)
    ]
    cons = [cp.sum(Q) == 1]
    for s in range(k):
        inflow = cp.sum(cp.hstack([Q[i] for i, (_, v) in enumerate(edges) if v == s]))
        cons.append(rho[s] == inflow)
    psi_vals = [psi(s[: psi.level]) for s in states]
    phi_vals = [phi(s[: phi.level]) for s in states]
    cons.append(
        cp.sum(cp.hstack([rho[s] * psi_vals[s] for s in range(k)])) == x
    )
    ent = -cp.sum(
        cp.hstack([cp.rel_entr(Q[i], rho[u]) for i, (u, _) in enumerate(edges)])
    )
    obj = ent + cp.sum(cp.hstack([rho[s] * phi_vals[s] for s in range(k)]))
    prob = cp.Problem(cp.Maximize(obj), cons)
    prob.solve(
        solver=cp.CLARABEL,
        tol_gap_abs=1e-12,
        tol_gap_rel=1e-12,
        tol_feas=1e-12,
    )
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"entropy program status {prob.status}")
    p0 = spectral_pressure(rule, phi).value
    return float(p0 - prob.value)
