"""Deviation laws, measure constructions, and equidistribution experiments.

Everything in this module reduces questions about orbits to dynamic
programming over the word chain:

* exact laws of Birkhoff sums under an equilibrium state,
* decay curves for deviation events over Birkhoff averages, fixed tiles and
  preimages, compared against the Legendre-transform rate function,
* the entropy-drop experiment at a periodic critical vertex (flower
  subsystems whose per-level entropy stays above the limit),
* an entropy-density construction gluing typical word blocks of several
  target measures into one strongly primitive subsystem,
* equilibrium measures supported on pair families with large Birkhoff sums,
* coarse-mass equidistribution curves for preimage and fixed-tile ensembles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from tilepress import cells, orbits
from tilepress.cells import TileWord, Word
from tilepress.measures import MarkovMeasure
from tilepress.rule import SubdivisionRule
from tilepress.subsystem import (
    COLORS,
    PrimitivityCertificate,
    Subsystem,
    make_subsystem,
    parry_equilibrium,
    primitivity,
    tile_matrix,
)
from tilepress.thermo import (
    Potential,
    _tail_extremes,
    birkhoff_bracket,
    cylinder_mass,
    distortion,
    equilibrium_state,
    gibbs_report,
    legendre_rate,
    spectral_pressure,
    word_chain,
)

__all__ = [
    "BirkhoffLaw",
    "birkhoff_law",
    "DeviationEntry",
    "DeviationCurve",
    "deviation_curve",
    "UscEntry",
    "UscReport",
    "usc_experiment",
    "DensityTarget",
    "DensityReport",
    "entropy_density_construct",
    "PairMeasureReport",
    "pair_measure_construct",
    "EquidistEntry",
    "EquidistCurve",
    "equidistribution_curve",
    "measure_window_masses",
]


# ---------------------------------------------------------------------------
# shared helpers


def _state_tail(
    rule: SubdivisionRule, phi: Potential, u: Word
) -> tuple[Fraction, Fraction]:
    """Bracket of the Birkhoff windows not covered by the chain states.

    For a word ending in the chain state ``u`` (length L >= phi.level), the
    windows starting strictly inside ``u`` split into those fully determined
    by ``u`` and the trailing incomplete ones; the bracket is exact.
    """
    ell = phi.level
    L = len(u)
    extra = sum(
        (phi.value(u[j : j + ell]) for j in range(1, L - ell + 1)), Fraction(0)
    )
    lo, hi = _tail_extremes(rule, phi, u[max(0, L - ell + 1) :])
    return extra + lo, extra + hi


def _rational_chain(
    mm: MarkovMeasure, max_den: int = 10**6, tol: float = 1e-9
) -> tuple[list[Fraction], list[list[Fraction]]] | None:
    """Exact rational (pi, P) reproducing the chain, if one exists nearby."""
    k = len(mm.states)
    pi = [Fraction(float(x)).limit_denominator(max_den) for x in mm.pi]
    P = [
        [
            Fraction(float(mm.P[i, j])).limit_denominator(max_den)
            if mm.P[i, j] > tol
            else Fraction(0)
            for j in range(k)
        ]
        for i in range(k)
    ]
    for i in range(k):
        if abs(float(pi[i]) - float(mm.pi[i])) > tol:
            return None
        for j in range(k):
            if abs(float(P[i][j]) - float(mm.P[i, j])) > tol:
                return None
    if sum(pi) != 1:
        return None
    for i in range(k):
        if sum(P[i]) != 1:
            return None
    for j in range(k):
        if sum(pi[i] * P[i][j] for i in range(k)) != pi[j]:
            return None
    return pi, P


# ---------------------------------------------------------------------------
# exact Birkhoff-sum laws


@dataclass
class BirkhoffLaw:
    """Distribution of the n-step Birkhoff sum of psi under mu_phi."""

    n: int
    exact: bool
    law: dict[Fraction, Fraction | float]

    def mean(self) -> float:
        return float(sum(float(s) * float(p) for s, p in self.law.items()))

    def tail(self, threshold: Fraction) -> Fraction | float:
        """Probability of { S_n psi >= threshold }, in the law's arithmetic."""
        zero: Fraction | float = Fraction(0) if self.exact else 0.0
        return sum(
            (p for s, p in self.law.items() if s >= threshold), zero
        )


def birkhoff_law(
    rule: SubdivisionRule,
    phi: Potential,
    psi: Potential,
    n: int,
    memory_cap: int = 2_000_000,
) -> BirkhoffLaw:
    """Exact law of S_n psi under the equilibrium state of phi.

    DP over (chain state, accumulated sum); the state space is the level
    max(level phi, level psi) word chain, so every psi window is determined
    by the state at its start and the law is exact (rational whenever the
    chain itself is rational, which covers the measure of maximal entropy
    of the shipped rules).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    L = max(phi.level, psi.level)
    states, _, adj = word_chain(rule, L)
    logw = [phi(s) for s in states]
    from tilepress.measures import equilibrium_markov

    mm = equilibrium_markov(
        states, adj, logw, "equilibrium" if phi.values else "parry"
    )
    psi_vals = [psi.value(s) for s in states]
    rat = _rational_chain(mm)
    exact = rat is not None

    if exact:
        piR, PR = rat
        dist: dict[tuple[int, Fraction], Fraction | float] = {}
        for i in range(len(states)):
            if piR[i]:
                dist[(i, psi_vals[i])] = piR[i]
        for _ in range(n - 1):
            nxt: dict[tuple[int, Fraction], Fraction | float] = {}
            for (i, s), p in dist.items():
                for j in adj[i]:
                    if PR[i][j]:
                        key = (j, s + psi_vals[j])
                        nxt[key] = nxt.get(key, Fraction(0)) + p * PR[i][j]
            if len(nxt) > memory_cap:
                raise MemoryError("state-sum table exceeds the memory cap")
            dist = nxt
    else:
        dist = {}
        for i in range(len(states)):
            if mm.pi[i] > 0:
                dist[(i, psi_vals[i])] = float(mm.pi[i])
        for _ in range(n - 1):
            nxt = {}
            for (i, s), p in dist.items():
                for j in adj[i]:
                    pij = float(mm.P[i, j])
                    if pij > 0:
                        key = (j, s + psi_vals[j])
                        nxt[key] = nxt.get(key, 0.0) + p * pij
            if len(nxt) > memory_cap:
                raise MemoryError("state-sum table exceeds the memory cap")
            dist = nxt

    law: dict[Fraction, Fraction | float] = {}
    zero: Fraction | float = Fraction(0) if exact else 0.0
    for (_, s), p in dist.items():
        law[s] = law.get(s, zero) + p
    return BirkhoffLaw(n=n, exact=exact, law=law)


# ---------------------------------------------------------------------------
# deviation curves


@dataclass
class DeviationEntry:
    n: int
    xi: float
    xi_lo: float
    xi_hi: float
    rate: float
    rate_lo: float
    rate_hi: float


@dataclass
class DeviationCurve:
    estimator: str  # "birkhoff" | "periodic" | "preimage"
    alpha: float
    entries: list[DeviationEntry]
    asymptotic_rate: float
    legendre_value: float
    final_gap: float
    fitted_gap: float


def _deviation_ratio(
    rule: SubdivisionRule,
    phi: Potential,
    psi: Potential,
    alpha: Fraction,
    n: int,
    estimator: str,
    base_color: int,
) -> tuple[float, float, float]:
    """(xi, xi_lo, xi_hi) for the weighted fraction of the deviation event.

    xi is the ratio of e^{S_n phi} summed over n-tiles whose S_n psi bracket
    clears n*alpha to the total sum, over closed words (periodic) or words
    ending in the base color (preimage); brackets account for the Birkhoff
    tails on both potentials and, in periodic mode, for the point weights
    w_n in [1, maxdeg] that tile-level sums cannot resolve.
    """
    L = max(phi.level, psi.level)
    if n < L:
        raise ValueError("n below the potential level")
    idx = rule.index
    states, _, adj = word_chain(rule, L)
    phi_w = [phi(s) for s in states]
    psi_w = [psi.value(s) for s in states]
    phi_tail = [_state_tail(rule, phi, s) for s in states]
    psi_tail = [_state_tail(rule, psi, s) for s in states]
    closed = estimator == "periodic"

    dist: dict[tuple[int, int, Fraction], float] = {}
    for i in range(len(states)):
        dist[(i if closed else -1, i, psi_w[i])] = math.exp(phi_w[i])
    for _ in range(n - L):
        nxt: dict[tuple[int, int, Fraction], float] = {}
        for (st, u, s), w in dist.items():
            for v in adj[u]:
                key = (st, v, s + psi_w[v])
                nxt[key] = nxt.get(key, 0.0) + w * math.exp(phi_w[v])
        dist = nxt

    thr = n * alpha
    tot_lo = tot_hi = tot_mid = 0.0
    r_lo = r_hi = r_mid = 0.0
    for (st, u, s), w in dist.items():
        last = states[u][-1]
        if closed:
            if idx.col[last] != idx.loc[states[st][0]]:
                continue
        else:
            if idx.col[last] != base_color:
                continue
        plo, phid = phi_tail[u]
        w_lo = w * math.exp(float(plo))
        w_hi = w * math.exp(float(phid))
        w_mid = w * math.exp(float(plo + phid) / 2.0)
        slo, shi = s + psi_tail[u][0], s + psi_tail[u][1]
        tot_lo += w_lo
        tot_hi += w_hi
        tot_mid += w_mid
        if slo >= thr:
            r_lo += w_lo
        if shi >= thr:
            r_hi += w_hi
        if (slo + shi) / 2 >= thr:
            r_mid += w_mid

    spread = float(orbits.max_local_degree(rule)) if closed else 1.0
    xi = r_mid / tot_mid if tot_mid > 0 else 0.0
    xi_lo = r_lo / (tot_hi * spread) if tot_hi > 0 else 0.0
    xi_hi = min(1.0, r_hi * spread / tot_lo) if tot_lo > 0 else 0.0
    return xi, xi_lo, xi_hi


def deviation_curve(
    rule: SubdivisionRule,
    phi: Potential,
    psi: Potential,
    alpha,
    estimator: str,
    n_range: Iterable[int],
    base_color: int = 0,
) -> DeviationCurve:
    """Decay curve of xi_n({Birkhoff mean >= alpha}) with rate comparison.

    The asymptotic rate is fitted by least squares of log xi_n against
    (n, log n, 1), which strips the polynomial prefactor that the raw
    -(1/n)log xi_n at the final n still carries.
    """
    if estimator not in ("birkhoff", "periodic", "preimage"):
        raise ValueError(f"unknown estimator {estimator!r}")
    alphaF = Fraction(alpha)
    entries: list[DeviationEntry] = []
    for n in sorted(set(n_range)):
        if estimator == "birkhoff":
            law = birkhoff_law(rule, phi, psi, n)
            xi = float(law.tail(n * alphaF))
            xi_lo = xi_hi = xi
        else:
            xi, xi_lo, xi_hi = _deviation_ratio(
                rule, phi, psi, alphaF, n, estimator, base_color
            )

        def rate_of(x: float) -> float:
            return math.inf if x <= 0.0 else -math.log(x) / n

        entries.append(
            DeviationEntry(
                n=n,
                xi=xi,
                xi_lo=xi_lo,
                xi_hi=xi_hi,
                rate=rate_of(xi),
                rate_lo=rate_of(xi_hi),
                rate_hi=rate_of(xi_lo),
            )
        )

    curve = legendre_rate(rule, phi, psi, xs=[float(alphaF)])
    k_alpha = float(curve.values[0])
    legendre_value = 0.0 if float(alphaF) <= curve.mean else k_alpha

    fit_pts = [(e.n, e.xi) for e in entries if e.xi > 0.0]
    if len(fit_pts) >= 3:
        A = np.array([[n, math.log(n), 1.0] for n, _ in fit_pts])
        b = np.array([math.log(x) for _, x in fit_pts])
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        asymptotic = -float(coef[0])
    elif fit_pts:
        asymptotic = entries[-1].rate
    else:
        asymptotic = math.inf
    final_rate = entries[-1].rate if entries else math.inf
    return DeviationCurve(
        estimator=estimator,
        alpha=float(alphaF),
        entries=entries,
        asymptotic_rate=asymptotic,
        legendre_value=legendre_value,
        final_gap=abs(final_rate - legendre_value),
        fitted_gap=abs(asymptotic - legendre_value),
    )


# ---------------------------------------------------------------------------
# entropy drop at a periodic critical vertex


@dataclass
class UscEntry:
    n: int
    words: list[TileWord]
    matrix: tuple[tuple[int, int], tuple[int, int]]
    h_top_exact: int  # number of length-(n+n_f) words counted by the radius
    h_top: float
    h_n: float
    rate_n: float
    coarse: dict[TileWord, float]
    mass_outside: float


@dataclass
class UscReport:
    k: int
    n_f: int
    vertex: "orbits.CriticalVertex"
    core_tile: str
    coarse_level: int
    entries: list[UscEntry]


def usc_experiment(
    rule: SubdivisionRule,
    n_range: Iterable[int],
    coarse: int = 2,
) -> UscReport:
    """Flower subsystems at a fixed critical vertex and their entropies.

    For each n, the 2k^n tiles of the level-n flower at the critical vertex
    p are extended by interior words of both colors (the strong-primitivity
    witnesses), giving a subsystem F_n of the (n+n_f)-fold map with
    h_top(F_n) = log(2 k^n).  The per-level entropies h_n exceed log k while
    the averaged measures concentrate on the orbit of p, whose point measure
    has entropy 0: the entropy seen along the sequence drops in the limit.
    """
    idx = rule.index
    report = orbits.critical_orbits(rule)
    if not report.has_periodic_critical_point:
        raise ValueError("rule has no periodic critical vertex")
    v0 = report.periodic_critical_vertex
    cv = next(
        c for c in report.vertices if c.periodic and c.zero_vertex == v0
    )
    v = cv.image_vertex
    if report.vertex_map[v] != v:
        raise NotImplementedError(
            "periodic (non-fixed) critical vertices: pass the iterate rule"
        )
    k = cv.local_degree

    rep = idx.tile_pos[cv.rep_tile]
    core = None
    for w in cells.flower(rule, (rep,), v):
        if idx.loc[w[0]] == idx.col[w[0]]:
            core = w[0]
            break
    if core is None:
        raise ValueError("no self-admissible tile in the critical flower")

    cert = primitivity(make_subsystem(rule), cap=6)
    if cert.kind != "stronglyPrimitive":
        raise ValueError("full map is not strongly primitive up to the cap")
    n_f = cert.witness_n or 1
    wit: dict[tuple[int, int], Word] = {}
    for (lname, cname), tw in cert.witnesses.items():
        wit[(COLORS.index(lname), COLORS.index(cname))] = cells.word_from_ids(
            rule, tw
        )

    entries: list[UscEntry] = []
    for n in sorted(set(n_range)):
        flower_words = cells.flower(rule, (core,) * n, v)
        if len(flower_words) != 2 * k**n:
            raise AssertionError("flower size does not match the local degree")
        alphabet: list[Word] = []
        for w in flower_words:
            c = idx.col[w[-1]]
            for target in (0, 1):
                alphabet.append(w + wit[(c, target)])
        sub = Subsystem(
            rule=rule, level=n + n_f, alphabet=alphabet, name=f"flower-{n}"
        )
        (a, b), (c2, d) = tile_matrix(sub).counts
        if b != a or d != c2 or a * d != b * c2 or a + d != 2 * k**n:
            raise AssertionError(
                "flower tile matrix is not rank one with radius 2k^n"
            )
        h_top = math.log(2 * k**n)

        mm = parry_equilibrium(sub)
        order = [alphabet[s[0]] for s in mm.states]
        Lb = n + n_f
        if coarse > Lb:
            raise ValueError("coarse level exceeds the block length")
        masses: dict[Word, float] = {}
        for j in range(Lb):
            if j + coarse <= Lb:
                for i, w in enumerate(order):
                    key = w[j : j + coarse]
                    masses[key] = masses.get(key, 0.0) + float(mm.pi[i]) / Lb
            else:
                for i, w in enumerate(order):
                    for i2, w2 in enumerate(order):
                        p = float(mm.pi[i]) * float(mm.P[i, i2])
                        if p <= 0.0:
                            continue
                        key = (w + w2)[j : j + coarse]
                        masses[key] = masses.get(key, 0.0) + p / Lb
        nbhd = set(cells.flower(rule, (core,) * coarse, v))
        outside = 1.0 - sum(masses.get(w, 0.0) for w in nbhd)

        entries.append(
            UscEntry(
                n=n,
                words=[cells.word_ids(rule, w) for w in alphabet],
                matrix=((a, b), (c2, d)),
                h_top_exact=2 * k**n,
                h_top=h_top,
                h_n=h_top / (n + n_f),
                rate_n=h_top / n,
                coarse={
                    cells.word_ids(rule, w): m for w, m in masses.items()
                },
                mass_outside=outside,
            )
        )
    return UscReport(
        k=k,
        n_f=n_f,
        vertex=cv,
        core_tile=idx.ids[core],
        coarse_level=coarse,
        entries=entries,
    )


# ---------------------------------------------------------------------------
# coarse window masses of a block chain (offset-averaged measures)


def _block_offset_masses(
    rule: SubdivisionRule,
    words: Sequence[Word],
    pi: np.ndarray,
    P: np.ndarray,
    ell: int,
) -> dict[Word, float]:
    """Level-ell masses of the orbit average of a chain over length-L blocks."""
    Lb = len(words[0])
    if ell > Lb:
        raise ValueError("window level exceeds the block length")
    A = len(words)
    W = np.array(words, dtype=np.int64)
    piA = np.asarray(pi, dtype=float)
    masses: dict[Word, float] = {}

    def bump(key: Word, m: float) -> None:
        if m > 0.0:
            masses[key] = masses.get(key, 0.0) + m / Lb

    EM = None
    for j in range(Lb):
        if j + ell <= Lb:
            uniq, inv = np.unique(W[:, j : j + ell], axis=0, return_inverse=True)
            agg = np.zeros(len(uniq))
            np.add.at(agg, inv, piA)
            for row, m in zip(uniq, agg):
                bump(tuple(int(x) for x in row), float(m))
        else:
            if EM is None:
                EM = piA[:, None] * np.asarray(P, dtype=float)
            s = Lb - j  # letters taken from the first block
            suf, suf_inv = np.unique(W[:, j:], axis=0, return_inverse=True)
            pre, pre_inv = np.unique(W[:, : ell - s], axis=0, return_inverse=True)
            S = np.zeros((A, len(suf)))
            S[np.arange(A), suf_inv] = 1.0
            Q = np.zeros((A, len(pre)))
            Q[np.arange(A), pre_inv] = 1.0
            M = S.T @ EM @ Q
            for a in range(len(suf)):
                for b in range(len(pre)):
                    bump(
                        tuple(int(x) for x in suf[a])
                        + tuple(int(x) for x in pre[b]),
                        float(M[a, b]),
                    )
    return masses


def measure_window_masses(
    mm: MarkovMeasure,
    letters_of_state: Sequence[Word],
    ell: int,
) -> dict[Word, float]:
    """Level-ell letter-window masses of a chain whose states carry letters.

    ``letters_of_state[i]`` is the (single) letter emitted by state i; the
    window mass aggregates probability over ell-step state paths.
    """
    k = len(mm.states)
    P = mm.P
    masses: dict[Word, float] = {}

    def rec(i: int, word: Word, p: float) -> None:
        if len(word) == ell:
            masses[word] = masses.get(word, 0.0) + p
            return
        row = P[i] if not hasattr(P, "getrow") else P.getrow(i).toarray()[0]
        for j in np.nonzero(np.asarray(row) > 0)[0]:
            rec(int(j), word + letters_of_state[int(j)], p * float(row[int(j)]))

    for i in range(k):
        if float(mm.pi[i]) > 0.0:
            rec(i, letters_of_state[i], float(mm.pi[i]))
    return masses


# ---------------------------------------------------------------------------
# entropy density


@dataclass
class DensityTarget:
    """A target chain together with its mixing weight.

    ``subsystem`` identifies the chain's states with rule words; chains
    produced by parry_equilibrium carry symbol tuples, so the subsystem they
    were built from is needed to translate.  Level-1 chains only.
    """

    measure: MarkovMeasure
    weight: float
    subsystem: Subsystem | None = None


@dataclass
class DensityReport:
    eps: float
    target_entropy: float
    start_location: str
    plan: list[dict]
    connectors: dict[tuple[str, str], TileWord]
    connector_length: int
    interior_pairs: "cells.InteriorPairReport"
    b_star: TileWord
    R: int
    budgets: dict[str, float]
    h_nu: float
    delta_h: float
    psi_integrals: list[tuple[float, float, float]]  # (nu, target, |delta|)
    certificate: PrimitivityCertificate
    success: bool
    notes: str = ""


def _target_support(
    tgt: DensityTarget,
) -> tuple[list[int], dict[int, list[int]], dict[tuple[int, int], float], dict[int, float]]:
    """Letters, supported transitions, and letter-level (pi, P) of a target."""
    mm = tgt.measure
    sub = tgt.subsystem

    def letter(state) -> int:
        w = sub.concat(state) if sub is not None else tuple(state)
        if len(w) != 1:
            raise NotImplementedError("density targets must be level-1 chains")
        return w[0]

    letters = [letter(s) for s in mm.states]
    support = sorted({t for t, p in zip(letters, mm.pi) if float(p) > 1e-15})
    pi_letter = {t: 0.0 for t in support}
    P_letter: dict[tuple[int, int], float] = {}
    adj: dict[int, list[int]] = {t: [] for t in support}
    for i, t in enumerate(letters):
        if float(mm.pi[i]) <= 1e-15:
            continue
        pi_letter[t] += float(mm.pi[i])
        for j in range(len(letters)):
            p = float(mm.P[i, j])
            if p > 1e-15:
                u = letters[j]
                P_letter[(t, u)] = P_letter.get((t, u), 0.0) + float(mm.pi[i]) * p
                if u not in adj[t]:
                    adj[t].append(u)
    for (t, u), m in list(P_letter.items()):
        P_letter[(t, u)] = m / pi_letter[t]
    for t in adj:
        adj[t].sort()
    return support, adj, P_letter, pi_letter


def _target_psi_mean(
    tgt: DensityTarget, psi: Potential, support, adj, P_letter, pi_letter
) -> float:
    """Integral of psi against the target, via ell-window path masses."""
    ell = psi.level
    total = 0.0

    def rec(t: int, word: Word, p: float) -> float:
        if len(word) == ell:
            return p * float(psi.value(word))
        return sum(
            rec(u, word + (u,), p * P_letter[(t, u)]) for u in adj[t]
        )

    for t in support:
        total += rec(t, (t,), pi_letter[t])
    return total


def _class_count(
    support: list[int],
    adj: dict[int, list[int]],
    loc: Sequence[int],
    col: Sequence[int],
    start_loc: int,
    n: int,
) -> int:
    """Exact number of support words of length n from loc=start to col=start."""
    cnt = {t: 1 if col[t] == start_loc else 0 for t in support}
    for _ in range(n - 1):
        cnt = {t: sum(cnt[u] for u in adj[t]) for t in support}
    return sum(cnt[t] for t in support if loc[t] == start_loc)


NEG_INF = float("-inf")


def _lse(values: Iterable[float]) -> float:
    vals = [v for v in values if v > NEG_INF]
    if not vals:
        return NEG_INF
    m = max(vals)
    return m + math.log(sum(math.exp(v - m) for v in vals))


def entropy_density_construct(
    rule: SubdivisionRule,
    targets: Sequence[DensityTarget | tuple],
    eps: float,
    psis: Sequence[Potential] = (),
    n_cap: int = 600,
) -> tuple[MarkovMeasure, DensityReport]:
    """Approximate a convex combination of chains by one ergodic subsystem MME.

    Blocks concatenate r_i typical words of length n_i per target; all
    selected words start and end in one reference face, so blocks glue
    freely and the block family is a full shift whose measure of maximal
    entropy has entropy exactly log(card blocks)/R.  That measure is
    returned as the uniform-completion chain on (position, letter) states,
    with one extra all-interior block b* that certifies strong primitivity
    (an interior word stays interior under any extension, so b* exists at
    every length; its overlap with the typical blocks is tracked exactly
    through matched-prefix states).

    Word selection is by face class only; the per-word Birkhoff windows of
    the observables are not enforced, and the observable integrals of the
    output are instead computed exactly and compared against the targets.
    """
    idx = rule.index
    tgts: list[DensityTarget] = []
    for t in targets:
        if isinstance(t, DensityTarget):
            tgts.append(t)
        else:
            tgts.append(DensityTarget(*t))
    wsum = sum(t.weight for t in tgts)
    if wsum <= 0:
        raise ValueError("target weights must be positive")
    weights = [t.weight / wsum for t in tgts]

    infos = [_target_support(t) for t in tgts]
    h_targets = [t.measure.entropy() for t in tgts]
    h_target = sum(w * h for w, h in zip(weights, h_targets))
    psi_targets = [
        sum(
            w * _target_psi_mean(t, psi, *info)
            for w, t, info in zip(weights, tgts, infos)
        )
        for psi in psis
    ]

    cert_full = primitivity(make_subsystem(rule), cap=6)
    if cert_full.kind != "stronglyPrimitive":
        raise ValueError("full map is not strongly primitive up to the cap")
    N = cert_full.witness_n or 1
    connectors = dict(cert_full.witnesses)
    pairs = cells.interior_pair_search(rule)

    # pick a start face present in every support
    start_loc = None
    for cand in (0, 1):
        if all(
            any(idx.loc[t] == cand for t in info[0]) for info in infos
        ):
            start_loc = cand
            break
    if start_loc is None:
        raise ValueError("no common face across the target supports")

    # multiplicities r_i proportional to the weights
    fracs = [Fraction(w).limit_denominator(16) for w in weights]
    q = 1
    for f in fracs:
        q = q * f.denominator // math.gcd(q, f.denominator)
    r = [max(1, round(w * q)) for w in weights]
    g = 0
    for x in r:
        g = math.gcd(g, x)
    r = [x // g for x in r]

    # greedy growth of the common word length until the exact deltas pass
    def plan_for(n0: int):
        ns, counts = [], []
        for info in infos:
            support, adj, _, _ = info
            n_i, c_i = n0, 0
            while n_i < n0 + 12:
                c_i = _class_count(support, adj, idx.loc, idx.col, start_loc, n_i)
                if c_i > 0:
                    break
                n_i += 1
            if c_i == 0:
                return None
            ns.append(n_i)
            counts.append(c_i)
        return ns, counts

    chosen = None
    n_try = 12
    while n_try <= n_cap:
        plan = plan_for(n_try)
        if plan is not None:
            ns, counts = plan
            R = sum(ri * ni for ri, ni in zip(r, ns))
            log_card = sum(ri * math.log(ci) for ri, ci in zip(r, counts))
            # the extra interior block adds one to the block count
            h_nu_pred = _lse([log_card, 0.0]) / R
            sel_ok = all(
                abs(math.log(ci) / ni - hi) <= eps / 2
                for ci, ni, hi in zip(counts, ns, h_targets)
            )
            if sel_ok and abs(h_nu_pred - h_target) <= 0.9 * eps:
                chosen = (ns, counts, R)
                if not psis:
                    break
                # observable deltas shrink like O(1/n); stop once the
                # entropy margin also leaves room for them
                if abs(h_nu_pred - h_target) <= 0.8 * eps and n_try >= 48:
                    break
        n_try = max(n_try + 4, int(n_try * 1.3))
    if chosen is None:
        raise ValueError("epsilon infeasible below the length cap")
    ns, counts, R = chosen

    # segment layout: r_i copies of each target's word slot, in order
    segments: list[int] = []
    for i in range(len(tgts)):
        segments.extend([i] * r[i])
    seg_len = [ns[i] for i in segments]
    seg_start = np.cumsum([0] + seg_len[:-1]).tolist()

    def seg_of(pos: int) -> tuple[int, int]:
        for s, st in enumerate(seg_start):
            if st <= pos < st + seg_len[s]:
                return s, pos - st
        raise IndexError(pos)

    # backward log-counts of block completions: lb[pos][letter]
    n_letters = idx.n_tiles
    lb = [dict() for _ in range(R)]
    for pos in range(R - 1, -1, -1):
        s, q_off = seg_of(pos)
        support, adj, _, _ = infos[segments[s]]
        last_in_seg = q_off == seg_len[s] - 1
        for t in support:
            if q_off == 0 and idx.loc[t] != start_loc:
                continue
            if last_in_seg:
                if idx.col[t] != start_loc:
                    continue
                if pos == R - 1:
                    lb[pos][t] = 0.0
                else:
                    nxt_support = infos[segments[s + 1]][0]
                    lb[pos][t] = _lse(
                        lb[pos + 1].get(u, NEG_INF)
                        for u in nxt_support
                        if idx.loc[u] == start_loc
                    )
            else:
                lb[pos][t] = _lse(lb[pos + 1].get(u, NEG_INF) for u in adj[t])
        lb[pos] = {t: v for t, v in lb[pos].items() if v > NEG_INF}

    log_card_float = _lse(lb[0].values())
    log_card_exact = sum(ri * math.log(ci) for ri, ci in zip(r, counts))
    if abs(log_card_float - log_card_exact) > 1e-6 * max(1.0, log_card_exact):
        raise AssertionError("block count DP disagrees with the closed form")

    # the all-interior extra block b*
    seed_key = next(k for k in connectors if k[0] == COLORS[start_loc])
    b_star = list(cells.word_from_ids(rule, connectors[seed_key]))
    while len(b_star) < R:
        succ = idx.successors[idx.col[b_star[-1]]]
        if len(b_star) == R - 1:
            pick = [t for t in succ if idx.col[t] == start_loc]
            if not pick:
                # back up one letter and steer through a different branch
                prev = idx.successors[idx.col[b_star[-2]]]
                for t2 in prev:
                    nxt = [
                        u
                        for u in idx.successors[idx.col[t2]]
                        if idx.col[u] == start_loc
                    ]
                    if nxt:
                        b_star[-1] = t2
                        pick = nxt
                        break
            b_star.append(pick[0])
        else:
            b_star.append(succ[0])
    b_star_w = tuple(b_star)
    if cells.interior_test(rule, b_star_w).touches_curve:
        raise AssertionError("the extra block is not interior")

    # overlap of b* with the typical blocks: log-count of typical blocks
    # sharing each prefix of b*, and whether b* is itself typical
    tc = [NEG_INF] * R  # tc[j] = log # typical blocks with prefix b*[:j+1]
    valid = True
    for j in range(R):
        s, q_off = seg_of(j)
        support, adj, _, _ = infos[segments[s]]
        t = b_star_w[j]
        if t not in support:
            valid = False
        if valid and q_off > 0 and b_star_w[j]:
            prev = b_star_w[j - 1]
            if t not in adj.get(prev, []):
                valid = False
        tc[j] = lb[j].get(t, NEG_INF) if valid else NEG_INF
        if tc[j] == NEG_INF:
            valid = False
    b_star_typical = valid

    # states: ("w", pos, letter) typical, ("b", pos) matched prefix of b*
    states: list[tuple] = []
    spos: dict[tuple, int] = {}
    for pos in range(R):
        for t in lb[pos]:
            key = ("w", pos, t)
            spos[key] = len(states)
            states.append(key)
    if not b_star_typical:
        for pos in range(R):
            key = ("b", pos)
            spos[key] = len(states)
            states.append(key)
    nstate = len(states)

    def out_log(key) -> float:
        if key[0] == "w":
            return lb[key[1]][key[2]]
        j = key[1]
        return math.log1p(math.exp(tc[j])) if tc[j] > NEG_INF else 0.0

    log_card_tot = (
        log_card_exact
        if b_star_typical
        else _lse([log_card_exact, 0.0])
    )

    def next_letters(pos: int, key) -> list[tuple[int, float]]:
        """Successor letters at pos+1 with log-counts of completions."""
        s, q_off = seg_of(pos)
        support, adj, _, _ = infos[segments[s]]
        t = key[2] if key[0] == "w" else b_star_w[pos]
        if q_off == seg_len[s] - 1:
            cands = infos[segments[s + 1]][0] if s + 1 < len(segments) else []
            cands = [u for u in cands if idx.loc[u] == start_loc]
        else:
            cands = adj.get(t, [])
        return [
            (u, lb[pos + 1][u]) for u in cands if u in lb[pos + 1]
        ]

    rows: list[dict[int, float]] = [dict() for _ in range(nstate)]
    for key in states:
        i = spos[key]
        pos = key[1]
        lo = out_log(key)
        if pos == R - 1:
            # wrap: a fresh block, uniformly
            for t in lb[0]:
                w = lb[0][t]
                if not b_star_typical and t == b_star_w[0]:
                    continue  # routed through the matched state instead
                rows[i][spos[("w", 0, t)]] = math.exp(w - log_card_tot)
            if not b_star_typical:
                rows[i][spos[("b", 0)]] = math.exp(out_log(("b", 0)) - log_card_tot)
            continue
        if key[0] == "w":
            for u, lbu in next_letters(pos, key):
                rows[i][spos[("w", pos + 1, u)]] = math.exp(lbu - lo)
        else:
            # matched prefix of b*: continue matching, or diverge into a
            # typical continuation with a different next letter
            cont = out_log(("b", pos + 1)) if pos + 1 < R else None
            if cont is not None:
                rows[i][spos[("b", pos + 1)]] = math.exp(cont - lo)
            if tc[pos] > NEG_INF:
                for u, lbu in next_letters(pos, key):
                    if u == b_star_w[pos + 1]:
                        continue
                    j2 = spos.get(("w", pos + 1, u))
                    if j2 is not None:
                        rows[i][j2] = math.exp(lbu - lo)

    # stationary law: prefix-count x completion-count at each position
    lfwd = [NEG_INF] * nstate
    for t in lb[0]:
        if not b_star_typical and t == b_star_w[0]:
            continue
        lfwd[spos[("w", 0, t)]] = 0.0
    if not b_star_typical:
        lfwd[spos[("b", 0)]] = 0.0
    order = sorted(range(nstate), key=lambda i: states[i][1])
    for i in order:
        if lfwd[i] == NEG_INF:
            continue
        key = states[i]
        if key[1] == R - 1:
            continue
        if key[0] == "w":
            for u, _ in next_letters(key[1], key):
                j2 = spos[("w", key[1] + 1, u)]
                lfwd[j2] = _lse([lfwd[j2], lfwd[i]])
        else:
            pos = key[1]
            if pos + 1 < R:
                j2 = spos[("b", pos + 1)]
                lfwd[j2] = _lse([lfwd[j2], lfwd[i]])
            if tc[pos] > NEG_INF:
                for u, _ in next_letters(pos, key):
                    if u == b_star_w[pos + 1]:
                        continue
                    j2 = spos.get(("w", pos + 1, u))
                    if j2 is not None:
                        lfwd[j2] = _lse([lfwd[j2], lfwd[i]])

    pi = np.zeros(nstate)
    for i, key in enumerate(states):
        if lfwd[i] > NEG_INF:
            pi[i] = math.exp(lfwd[i] + out_log(key) - log_card_tot) / R
    if abs(pi.sum() - 1.0) > 1e-8:
        raise AssertionError("stationary law does not sum to 1")
    pi /= pi.sum()

    if nstate > 4000:
        from scipy import sparse

        P = sparse.lil_matrix((nstate, nstate))
        for i, row in enumerate(rows):
            for j2, p in row.items():
                P[i, j2] = p
        P = P.tocsr()
    else:
        P = np.zeros((nstate, nstate))
        for i, row in enumerate(rows):
            for j2, p in row.items():
                P[i, j2] = p

    nu = MarkovMeasure(
        states=states, pi=pi, P=P, provenance="constructed", log_lambda=0.0
    )
    h_nu = log_card_tot / R
    if abs(nu.entropy() - h_nu) > 1e-8:
        raise AssertionError("chain entropy disagrees with log(card)/R")

    letters_of_state = [
        (key[2],) if key[0] == "w" else (b_star_w[key[1]],) for key in states
    ]
    psi_integrals = []
    for psi, tgt_mean in zip(psis, psi_targets):
        masses = measure_window_masses(nu, letters_of_state, psi.level)
        val = sum(m * float(psi.value(w)) for w, m in masses.items())
        psi_integrals.append((val, tgt_mean, abs(val - tgt_mean)))

    b_tw = cells.word_ids(rule, b_star_w)
    cert = PrimitivityCertificate(
        kind="stronglyPrimitive",
        cap=1,
        witness_n=1,
        witnesses={(COLORS[start_loc], COLORS[start_loc]): b_tw},
    )
    delta_h = abs(h_nu - h_target)
    success = delta_h <= eps and all(d <= eps for _, _, d in psi_integrals)
    report = DensityReport(
        eps=eps,
        target_entropy=h_target,
        start_location=COLORS[start_loc],
        plan=[
            {
                "target": i,
                "n": ns[i],
                "r": r[i],
                "card": counts[i],
                "log_card_per_letter": math.log(counts[i]) / ns[i],
                "entropy": h_targets[i],
            }
            for i in range(len(tgts))
        ],
        connectors=connectors,
        connector_length=N,
        interior_pairs=pairs,
        b_star=b_tw,
        R=R,
        budgets={
            "count_halving": math.log(2) / R,
            "weight_mismatch": max(
                abs(r[i] * ns[i] / R - weights[i]) for i in range(len(tgts))
            ),
            "eps_over_6": eps / 6,
            "eps_over_3": eps / 3,
        },
        h_nu=h_nu,
        delta_h=delta_h,
        psi_integrals=psi_integrals,
        certificate=cert,
        success=success,
        notes=(
            "words selected by face class; observable deltas verified on the "
            "output instead of per-word windows; connectors unused between "
            "class-aligned blocks and reported for reference"
        ),
    )
    return nu, report


# ---------------------------------------------------------------------------
# pair measures


@dataclass
class PairMeasureReport:
    n: int
    alpha: list[float]
    total_pairs: int
    qualifying: int
    interior_by_location: dict[str, cells.Pair]
    integrals: list[float]
    lower_bounds: list[float]
    pair_distortions: list[float]  # max S_n oscillation over a qualifying pair
    integral_ok: bool
    union_mass: float
    union_bound: float
    gibbs_constant: float
    free_energy: float
    union_ok: bool


def pair_measure_construct(
    rule: SubdivisionRule,
    phi: Potential,
    Phi: Potential | Sequence[Potential],
    alpha,
    n: int,
    coarse: int | None = None,
) -> tuple[MarkovMeasure, PairMeasureReport]:
    """Equilibrium measure carried by pairs with large Birkhoff sums.

    A pair qualifies when one of its tiles has every component of its
    S_n Phi bracket reaching n*alpha at the top (some point of the pair
    has the large average).  The equilibrium state of the qualifying
    pair-tile subsystem (over the n-fold map, with weight e^{S_n phi}) is
    orbit-averaged; the report checks the two structural inequalities:
    the averaged Phi integrals reach alpha - 2 D_n^pair(Phi)/n, where
    2 D_n^pair is the worst S_n Phi oscillation over a qualifying pair
    (the combinatorial stand-in for twice the tile distortion: both tiles
    see the shared edge, so no point of the pair can fall further below
    the qualifying value), and the phi-equilibrium mass of the union
    decays with the free-energy deficit of the averaged measure.
    """
    Phis = [Phi] if isinstance(Phi, Potential) else list(Phi)
    alphas = [Fraction(a) for a in (alpha if isinstance(alpha, (list, tuple)) else [alpha])]
    if len(alphas) != len(Phis):
        raise ValueError("alpha vector length must match the potential vector")
    if n < max(p.level for p in Phis + [phi]):
        raise ValueError("n below the potential level")

    def brackets(w: Word) -> list[tuple[Fraction, Fraction]]:
        return [birkhoff_bracket(rule, p, w) for p in Phis]

    def qualifies(br: list[tuple[Fraction, Fraction]]) -> bool:
        return all(hi >= n * a for (_, hi), a in zip(br, alphas))

    all_pairs = cells.enumerate_pairs(rule, n)
    chosen: list[cells.Pair] = []
    words: set[Word] = set()
    interior: dict[str, cells.Pair] = {}
    posc = [Fraction(0)] * len(Phis)
    for pair in all_pairs:
        w1 = cells.word_from_ids(rule, pair.first)
        w2 = cells.word_from_ids(rule, pair.second)
        br1, br2 = brackets(w1), brackets(w2)
        if not (qualifies(br1) or qualifies(br2)):
            continue
        for j in range(len(Phis)):
            osc = max(br1[j][1], br2[j][1]) - min(br1[j][0], br2[j][0])
            posc[j] = max(posc[j], osc)
        chosen.append(pair)
        words.add(w1)
        words.add(w2)
        if pair.location not in interior and not pair.on_curve_seam:
            if not cells.interior_test(rule, w1).touches_curve and not (
                cells.interior_test(rule, w2).touches_curve
            ):
                interior[pair.location] = pair
    if not chosen:
        raise ValueError("no pair reaches the target averages")
    if len(interior) < 2:
        raise ValueError("qualifying pairs lack an interior pair in each face")

    alphabet = sorted(words)
    sub = Subsystem(rule=rule, level=n, alphabet=alphabet, name=f"pairs-{n}")

    def s_n_phi(w: Word) -> float:
        lo, hi = birkhoff_bracket(rule, phi, w)
        return float(lo + hi) / 2.0

    mm_hat = parry_equilibrium(sub, phi=s_n_phi)
    order = [alphabet[s[0]] for s in mm_hat.states]

    integrals = []
    lower = []
    for j, (p, a) in enumerate(zip(Phis, alphas)):
        masses = _block_offset_masses(rule, order, mm_hat.pi, mm_hat.P, p.level)
        val = sum(m * float(p.value(w)) for w, m in masses.items())
        integrals.append(val)
        min_w = float(min(list(p.values.values()) + [Fraction(0)]))
        bound = (
            float(a)
            - float(posc[j]) / n
            + (p.level - 1) / n * (min_w - float(a))
        )
        lower.append(bound)
    integral_ok = all(v >= b - 1e-9 for v, b in zip(integrals, lower))

    mm_phi = equilibrium_state(rule, phi)
    union_mass = sum(
        cylinder_mass(rule, mm_phi, cells.word_from_ids(rule, pair.first))
        + cylinder_mass(rule, mm_phi, cells.word_from_ids(rule, pair.second))
        for pair in chosen
    )
    phi_masses = _block_offset_masses(rule, order, mm_hat.pi, mm_hat.P, phi.level)
    phi_mean = sum(m * float(phi.value(w)) for w, m in phi_masses.items())
    h_mu = mm_hat.entropy() / n
    pressure = spectral_pressure(rule, phi).value
    free_energy = h_mu + phi_mean - pressure
    gr = gibbs_report(rule, phi, min(n, 6))
    C = 2.0 * gr.max_ratio * math.exp(2.0 * float(distortion(rule, phi, n)))
    union_bound = C * math.exp(free_energy * n)
    union_ok = union_mass <= union_bound + 1e-9

    ell = coarse if coarse is not None else max(p.level for p in Phis + [phi])
    masses = _block_offset_masses(rule, order, mm_hat.pi, mm_hat.P, ell)
    m1 = _block_offset_masses(rule, order, mm_hat.pi, mm_hat.P, ell + 1) if ell < n else {}
    sts = sorted(masses)
    posm = {w: i for i, w in enumerate(sts)}
    piM = np.array([masses[w] for w in sts])
    PM = np.zeros((len(sts), len(sts)))
    for w, mass in m1.items():
        a_w, b_w = w[:-1], w[1:]
        if a_w in posm and b_w in posm:
            PM[posm[a_w], posm[b_w]] += mass
    for i in range(len(sts)):
        tot = PM[i].sum()
        if tot > 0:
            PM[i] /= tot
    mu = MarkovMeasure(
        states=sts, pi=piM / piM.sum(), P=PM, provenance="pushforward-average"
    )
    report = PairMeasureReport(
        n=n,
        alpha=[float(a) for a in alphas],
        total_pairs=len(all_pairs),
        qualifying=len(chosen),
        interior_by_location=interior,
        integrals=integrals,
        lower_bounds=lower,
        pair_distortions=[float(x) for x in posc],
        integral_ok=integral_ok,
        union_mass=union_mass,
        union_bound=union_bound,
        gibbs_constant=C,
        free_energy=free_energy,
        union_ok=union_ok,
    )
    return mu, report


# ---------------------------------------------------------------------------
# equidistribution curves


@dataclass
class EquidistEntry:
    n: int
    tv: float  # with the unassigned mass allocated proportionally to ref
    tv_lo: float  # best-case allocation; true TV lies in [tv_lo, tv_lo+bracket]
    tv_hi: float
    bracket: float
    masses: dict[TileWord, float]


@dataclass
class EquidistCurve:
    mode: str  # "preimage" | "periodic"
    coarse: int
    reference: dict[TileWord, float]
    entries: list[EquidistEntry]


def _window_masses(
    rule: SubdivisionRule,
    phi: Potential,
    n: int,
    ell: int,
    mode: str,
    base_color: int,
) -> dict[Word, float]:
    """Level-ell masses of the orbit average of a weighted point ensemble.

    Periodic mode takes all points of period n: their itineraries wrap, so
    the e^{S_n phi} weights and all n window masses are exact.  Preimage
    mode takes the n-fold preimages of a generic point of the base face:
    offsets i <= n-ell are determined by the word and assigned mass 1/n
    each (with the weight at the Birkhoff bracket midpoint); the remaining
    (ell-1)/n of mass depends on the base point and is left unassigned for
    the caller to bracket.
    """
    L = phi.level
    if n < max(L, ell):
        raise ValueError("n too small for the requested window level")
    idx = rule.index
    states, pos, adj = word_chain(rule, L)
    k = len(states)
    phi_v = [phi(s) for s in states]
    Wm = np.zeros((k, k))
    for i in range(k):
        for j in adj[i]:
            Wm[i, j] = math.exp(phi_v[j])
    start = np.array([math.exp(phi_v[i]) for i in range(k)])
    T = n - L
    pws = [np.eye(k)]
    for _ in range(T):
        pws.append(pws[-1] @ Wm)

    def tail_windows(ext_letters: Word) -> float:
        """Sum of the phi windows starting strictly inside the last state."""
        return sum(
            float(phi.value(ext_letters[j : j + L][: phi.level]))
            for j in range(1, L)
        )

    masses: dict[Word, float] = {}
    if mode == "preimage":
        endv = np.zeros(k)
        conts: list[Word] = [()] * k
        for u, s in enumerate(states):
            if idx.col[s[-1]] != base_color:
                continue
            conts[u] = s
            lo, hi = _state_tail(rule, phi, s)
            endv[u] = math.exp(float(lo + hi) / 2.0)
        f_list = [start @ pws[t] for t in range(T + 1)]
        b_list = [pws[T - t] @ endv for t in range(T + 1)]
        Z = float(f_list[T] @ endv)
        trail_f = [(u, float(f_list[T][u])) for u in range(k) if endv[u] > 0.0]
    elif mode == "periodic":
        E = np.zeros((k, k))
        conts2: dict[tuple[int, int], Word] = {}
        for u, s in enumerate(states):
            for i0, s0 in enumerate(states):
                if idx.col[s[-1]] == idx.loc[s0[0]]:
                    w2 = s + s0
                    conts2[(u, i0)] = w2
                    E[u, i0] = math.exp(tail_windows(w2))
        F_list = [np.diag(start) @ pws[t] for t in range(T + 1)]
        B_list = [pws[T - t] @ E for t in range(T + 1)]
        Z = float(np.trace(F_list[T] @ E))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    mid_end = min(n - ell, T)
    for wl in cells.enumerate_tiles(rule, ell):
        acc = 0.0
        if ell >= L:
            if wl[:L] not in pos or wl[ell - L :] not in pos:
                continue
            su = pos[wl[:L]]
            ev = pos[wl[ell - L :]]
            pathw = 1.0
            ok = True
            for s2 in range(1, ell - L + 1):
                a_s = pos[wl[s2 - 1 : s2 - 1 + L]]
                b_s = pos[wl[s2 : s2 + L]]
                if Wm[a_s, b_s] == 0.0:
                    ok = False
                    break
                pathw *= Wm[a_s, b_s]
            if not ok:
                continue
            for i in range(mid_end + 1):
                if mode == "preimage":
                    acc += float(f_list[i][su]) * pathw * float(
                        b_list[i + ell - L][ev]
                    )
                else:
                    acc += pathw * float((B_list[i + ell - L] @ F_list[i])[ev, su])
        else:
            sel = [u for u, s in enumerate(states) if s[:ell] == wl]
            for i in range(mid_end + 1):
                if mode == "preimage":
                    acc += sum(
                        float(f_list[i][u]) * float(b_list[i][u]) for u in sel
                    )
                else:
                    acc += sum(
                        float((B_list[i] @ F_list[i])[u, u]) for u in sel
                    )
        # trailing offsets: windows inside the final state (preimage) or
        # reaching into the wrapped continuation (periodic)
        trail_stop = n if mode == "periodic" else n - ell + 1
        for i in range(mid_end + 1, trail_stop):
            if mode == "preimage":
                for u, fw in trail_f:
                    if conts[u][i - T : i - T + ell] == wl:
                        acc += fw * endv[u]
            else:
                for (u, i0), w2 in conts2.items():
                    if w2[i - T : i - T + ell] == wl:
                        acc += float(F_list[T][i0, u]) * E[u, i0]
        if acc > 0.0:
            masses[wl] = acc / (n * Z)
    return masses


def equidistribution_curve(
    rule: SubdivisionRule,
    phi: Potential,
    n_range: Iterable[int],
    coarse: int = 2,
    mode: str = "preimage",
    base_color: int = 0,
) -> EquidistCurve:
    """Coarse-mass TV distance of orbit-averaged point ensembles to mu_phi.

    Periodic-mode masses are exact (wrapped itineraries) and the bracket is
    0.  Preimage-mode masses leave (ell-1)/n unassigned; the reported tv
    allocates it proportionally to the reference, and [tv_lo, tv_hi]
    brackets every allocation.
    """
    mm = equilibrium_state(rule, phi)
    L = phi.level
    ref: dict[Word, float] = {}
    if coarse >= L:
        for w in cells.enumerate_tiles(rule, coarse):
            m = cylinder_mass(rule, mm, w)
            if m > 0:
                ref[w] = m
    else:
        for i, s in enumerate(mm.states):
            key = s[:coarse]
            ref[key] = ref.get(key, 0.0) + float(mm.pi[i])

    entries: list[EquidistEntry] = []
    for n in sorted(set(n_range)):
        masses = _window_masses(rule, phi, n, coarse, mode, base_color)
        boundary = max(0.0, 1.0 - sum(masses.values()))
        keys = set(masses) | set(ref)
        tv = 0.5 * sum(
            abs(
                masses.get(w, 0.0)
                + boundary * ref.get(w, 0.0)
                - ref.get(w, 0.0)
            )
            for w in keys
        )
        # best case: fill the largest deficits first
        deficit = sum(
            max(0.0, ref.get(w, 0.0) - masses.get(w, 0.0)) for w in keys
        )
        excess = sum(
            max(0.0, masses.get(w, 0.0) - ref.get(w, 0.0)) for w in keys
        )
        if boundary <= deficit:
            tv_lo = 0.5 * (deficit - boundary + excess)
        else:
            tv_lo = 0.5 * (boundary - deficit + excess)
        tv_hi = min(1.0, tv_lo + boundary)
        entries.append(
            EquidistEntry(
                n=n,
                tv=tv,
                tv_lo=tv_lo,
                tv_hi=tv_hi,
                bracket=boundary,
                masses={cells.word_ids(rule, w): m for w, m in masses.items()},
            )
        )
    return EquidistCurve(
        mode=mode,
        coarse=coarse,
        reference={cells.word_ids(rule, w): m for w, m in ref.items()},
        entries=entries,
    )
