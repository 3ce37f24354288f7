"""Exact verification on small instances.

Everything here runs in exact rational arithmetic over a finite alphabet
with window-truncated events, by full enumeration of driving sequences:

* `enumerate_exact` computes the joint law of break times and segments and
  the conditional law of the next (gap, segment) given every
  positive-probability history, which is precisely what the i.i.d.
  conclusion constrains;
* `check_monotonicity_cor1` / `check_conditions_cor2` decide the
  factorization conditions that drive the i.i.d. result, constructively:
  the indicator of the earlier event, restricted to occurrences of the
  later one, must project onto the in-between coordinates with a single
  well-defined value.  A violating pair of completions is returned as a
  witness;
* `verify_iid_segments_exact` / `eq37_flatness` check the conclusions
  themselves (history-independence of cycle laws, and proportionality of
  the gap pmf to the in-between event probability with one constant).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from regenlab.core import Alphabet


class MeasurabilityError(RuntimeError):
    """An event predicate read outside its declared window."""


class EnumerationSizeError(RuntimeError):
    """The enumeration guard |alphabet|^(T+L) was exceeded."""


ENUM_GUARD = 10 ** 8


@dataclass(frozen=True)
class TruncatedEventSpec:
    """Finite-window event: `predicate` receives exactly the declared
    window of symbols.

    kind "future": window (xi_{n+1}, ..., xi_{n+L}); lookahead L >= 1.
    kind "past":   window (xi_{n-P+1}, ..., xi_n); at indices n < P the
                   available shorter prefix is passed.
    """

    kind: str
    window: int
    predicate: Callable[[tuple], bool]
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("future", "past"):
            raise ValueError(f"kind must be future/past, got {self.kind!r}")
        if self.kind == "future" and self.window < 1:
            raise ValueError("future events need lookahead >= 1")
        if self.window < 0:
            raise ValueError("window must be nonnegative")

    def holds(self, window: tuple) -> bool:
        try:
            return bool(self.predicate(window))
        except IndexError as exc:
            raise MeasurabilityError(
                f"event {self.name or self.kind!r} read outside its "
                f"declared window of {self.window} symbols") from exc


ALWAYS = TruncatedEventSpec("past", 0, lambda w: True, "always")


@dataclass
class ExactLaw:
    """Exact joint/conditional laws from full enumeration."""

    alphabet: Alphabet
    T: int
    lookahead: int
    past_window: int
    min_separation: int
    total_mass: Fraction
    # (k, taus_tuple, xi_prefix_tuple) -> [mass, {(gap, segment): mass}]
    cond: dict
    # (tau0, tau1, segment_1) -> mass ; plus censored (tau0, None, None)
    joint01: dict
    # gap -> {symbol right after the later break: mass}
    next_symbol_after_gap: dict
    tau0_pmf: dict

    def gap_marginal(self) -> dict:
        """Exact pmf of tau_1 - tau_0 restricted to pairs detected within
        the enumeration window, normalized by the detected mass."""
        acc: dict = defaultdict(Fraction)
        tot = Fraction(0)
        for (t0, t1, _seg), m in self.joint01.items():
            if t1 is not None:
                acc[t1 - t0] += m
                tot += m
        if tot == 0:
            return {}
        return {g: acc[g] / tot for g in sorted(acc)}


def _event_tables(alphabet: Alphabet, spec: TruncatedEventSpec):
    """Truth table of the event over all windows of its declared length,
    plus tables for the shorter prefixes a past event sees near the
    origin."""
    syms = alphabet.symbols
    tables = {}
    lengths = ([spec.window] if spec.kind == "future"
               else range(spec.window + 1))
    for ln in lengths:
        tbl = {}
        for w in itertools.product(syms, repeat=ln):
            tbl[w] = spec.holds(w)
        tables[ln] = tbl
    return tables


def enumerate_exact(alphabet: Alphabet, T: int,
                    H: TruncatedEventSpec | None,
                    F: TruncatedEventSpec,
                    min_separation: int = 1) -> ExactLaw:
    """Exact law of break times and segments for A_n = H_n * F_n over
    n = 0..T, events truncated to their declared windows, occurrences
    thinned greedily from the left by min_separation."""
    if F.kind != "future":
        raise ValueError("F must be a future event")
    H = H or ALWAYS
    if H.kind != "past":
        raise ValueError("H must be a past event")
    k = len(alphabet.symbols)
    L, P = F.window, H.window
    if k ** (T + L) > ENUM_GUARD:
        raise EnumerationSizeError(
            f"|alphabet|^(T+L) = {k}^{T + L} exceeds {ENUM_GUARD}")
    syms = alphabet.symbols
    weights = alphabet.exact_weights
    ftbl = _event_tables(alphabet, F)[L]
    htbls = _event_tables(alphabet, H)

    cond: dict = {}
    joint01: dict = defaultdict(Fraction)
    nxt: dict = defaultdict(lambda: defaultdict(Fraction))
    tau0_pmf: dict = defaultdict(Fraction)
    total = Fraction(0)
    mass_cache: dict = {}

    for w in itertools.product(range(k), repeat=T + L):
        counts = [0] * k
        for d in w:
            counts[d] += 1
        key = tuple(counts)
        mass = mass_cache.get(key)
        if mass is None:
            mass = Fraction(1)
            for i, c in enumerate(counts):
                mass *= weights[i] ** c
            mass_cache[key] = mass
        total += mass
        seq = tuple(syms[d] for d in w)
        taus = []
        nxt_ok = 0
        for n in range(0, T + 1):
            if n < nxt_ok:
                continue
            past = seq[max(0, n - P):n]
            if not htbls[len(past)][past]:
                continue
            if not ftbl[seq[n:n + L]]:
                continue
            taus.append(n)
            nxt_ok = n + min_separation
        if not taus:
            continue
        tau0_pmf[taus[0]] += mass
        for j in range(len(taus)):
            t = taus[j]
            keyj = (j, tuple(taus[:j + 1]), seq[:t])
            slot = cond.get(keyj)
            if slot is None:
                slot = [Fraction(0), defaultdict(Fraction)]
                cond[keyj] = slot
            slot[0] += mass
            if j + 1 < len(taus):
                t2 = taus[j + 1]
                seg = seq[t:t2]
                slot[1][(t2 - t, seg)] += mass
                nxt[t2 - t][seq[t2]] += mass
        t0 = taus[0]
        if len(taus) >= 2:
            joint01[(t0, taus[1], seq[t0:taus[1]])] += mass
        else:
            joint01[(t0, None, None)] += mass

    if total != 1:
        raise AssertionError(f"enumeration masses sum to {total}, not 1")
    nxt = {g: dict(v) for g, v in nxt.items()}
    return ExactLaw(alphabet, T, L, P, min_separation, total, cond,
                    dict(joint01), nxt, dict(tau0_pmf))


@dataclass
class IidReport:
    passed: bool
    witness: tuple | None = None
    common_law: dict | None = None

    def witness_text(self) -> str:
        if self.witness is None:
            return "no witness"
        key_a, key_b, outcome, va, vb = self.witness
        return (f"conditional P{outcome} differs between histories "
                f"{key_a} ({va}) and {key_b} ({vb})")


def verify_iid_segments_exact(law: ExactLaw) -> IidReport:
    """The i.i.d. conclusion, checked exactly: for every positive-mass
    history (break times so far + driving prefix), the conditional law of
    the next (gap, segment) is one and the same, wherever the enumeration
    window can decide it."""
    ref: dict = {}
    ref_key: dict = {}
    # pass 1: collect the reference law across all histories
    for key, (mass, outcomes) in law.cond.items():
        for (g, seg), m in outcomes.items():
            p = m / mass
            if (g, seg) in ref:
                if ref[(g, seg)] != p:
                    return IidReport(False, (ref_key[(g, seg)], key,
                                             (g, seg), ref[(g, seg)], p))
            else:
                ref[(g, seg)] = p
                ref_key[(g, seg)] = key
    # pass 2: every history must reproduce the reference wherever its
    # enumeration room can decide the outcome (absence means probability 0)
    for key, (mass, outcomes) in law.cond.items():
        room = law.T - key[1][-1]
        for (g, seg), p in ref.items():
            if g <= room and (g, seg) not in outcomes and p != 0:
                return IidReport(False, (ref_key[(g, seg)], key,
                                         (g, seg), p, Fraction(0)))
    return IidReport(True, None, ref)


@dataclass
class FactorizationReport:
    """Outcome of a projection-based factorization check at separations
    m = 1..max_m; factor_sets[m] is the set of in-between words whose
    projected indicator is 1 (only meaningful when passed)."""

    passed: bool
    checked_m: list
    failures: dict = field(default_factory=dict)  # m -> witness tuple
    factor_sets: dict = field(default_factory=dict)

    def witness_text(self, m: int) -> str:
        if m not in self.failures:
            return "no witness"
        mid, w_a, w_b = self.failures[m]
        return (f"m={m}: with in-between word {mid}, completions {w_a} and "
                f"{w_b} both realize the later event but give opposite "
                f"verdicts for the earlier one")


def check_monotonicity_cor1(alphabet: Alphabet, F: TruncatedEventSpec,
                            max_m: int,
                            min_separation: int = 1) -> FactorizationReport:
    """Does F_n * F_{n+m} factor through the in-between coordinates?

    For each m in [min_separation, max_m]: project the indicator of F_n,
    restricted to completions where F_{n+m} occurs, onto
    xi_{n+1}..xi_{n+m}; the condition holds iff the projection is
    well-defined (same verdict for every completion).
    """
    syms = alphabet.symbols
    L = F.window
    ftbl = _event_tables(alphabet, F)[L]
    f_true = [w for w in itertools.product(syms, repeat=L) if ftbl[w]]
    report = FactorizationReport(True, list(range(min_separation, max_m + 1)))
    for m in report.checked_m:
        eset = set()
        ok = True
        for mid in itertools.product(syms, repeat=min(m, L)):
            if m >= L:
                # F_n readable from the in-between word alone
                if ftbl[mid[:L]]:
                    eset.add(mid)
                continue
            val = None
            for w2 in f_true:
                v = ftbl[(mid + w2)[:L]]
                if val is None:
                    val, first = v, w2
                elif v != val:
                    report.passed = False
                    report.failures[m] = (mid, first, w2)
                    ok = False
                    break
            if not ok:
                break
            if val:
                eset.add(mid)
        if ok:
            report.factor_sets[m] = eset
    return report


def check_conditions_cor2(alphabet: Alphabet, H: TruncatedEventSpec,
                          F: TruncatedEventSpec, max_m: int,
                          min_separation: int = 1):
    """Both factorization conditions for past-and-future break events
    A_n = H_n * F_n: the joint-occurrence condition (A_n against A_{n+m})
    and the past-propagation condition (A_n against H_{n+m}).

    Returns (joint_report, past_report).
    """
    syms = alphabet.symbols
    L, P = F.window, H.window
    ftbl = _event_tables(alphabet, F)[L]
    htbls = _event_tables(alphabet, H)
    pasts = [p for p in itertools.product(syms, repeat=P) if htbls[P][p]]
    f_true = [w for w in itertools.product(syms, repeat=L) if ftbl[w]]

    joint = FactorizationReport(True, list(range(min_separation, max_m + 1)))
    pastr = FactorizationReport(True, list(range(min_separation, max_m + 1)))

    def h_at(full: tuple, end: int) -> bool:
        # H evaluated at position `end` within the concatenated word,
        # seeing exactly its trailing window
        lo = max(0, end - P)
        return htbls[min(P, end)][full[lo:end]]

    for m in joint.checked_m:
        eset = set()
        jok = True
        for mid in itertools.product(syms, repeat=m):
            val = None
            first = None
            for p in pasts:
                for w2 in f_true:
                    full = p + mid + w2
                    if not h_at(full, len(p) + m):
                        continue  # A_{n+m} needs H_{n+m}
                    v = ftbl[(mid + w2)[:L]]
                    if val is None:
                        val, first = v, (p, w2)
                    elif v != val:
                        joint.passed = False
                        joint.failures[m] = (mid, first, (p, w2))
                        jok = False
                        break
                if not jok:
                    break
            if not jok:
                break
            if val:
                eset.add(mid)
        if jok:
            joint.factor_sets[m] = eset

    for m in pastr.checked_m:
        eset = set()
        pok = True
        for mid in itertools.product(syms, repeat=m):
            val = None
            first = None
            for p in pasts:
                # completions only matter through F_n-satisfiability, which
                # does not involve p; skip words where A_n cannot occur
                fn_possible = any(ftbl[(mid + w2)[:L]] for w2 in f_true) \
                    if m < L else ftbl[mid[:L]]
                if not fn_possible:
                    continue
                v = h_at(p + mid, len(p) + m)
                if val is None:
                    val, first = v, p
                elif v != val:
                    pastr.passed = False
                    pastr.failures[m] = (mid, first, p)
                    pok = False
                    break
            if not pok:
                break
            if val:
                eset.add(mid)
        if pok:
            pastr.factor_sets[m] = eset

    return joint, pastr


def eq37_flatness(law: ExactLaw, F: TruncatedEventSpec):
    """Exact proportionality of the gap pmf to the probability of the
    in-between event ("earlier event holds, no occurrence before the later
    one"), for future-only break systems without enforced separation.

    Returns (passed, a, table) with table[g] = (gap_pmf, event_prob,
    ratio); a is the common rational ratio when passed.
    """
    if law.min_separation != 1:
        raise ValueError("exact flatness is computed for unthinned scans "
                         "(min_separation == 1) only")
    alphabet = law.alphabet
    L = F.window
    rep = check_monotonicity_cor1(alphabet, F, law.T, 1)
    if not rep.passed:
        raise ValueError("factorization fails; the flatness identity only "
                         "applies to monotone future events")
    iid = verify_iid_segments_exact(law)
    if not iid.passed:
        raise ValueError("segments are not i.i.d.; flatness undefined")
    nu_gap: dict = defaultdict(Fraction)
    for (g, _seg), p in iid.common_law.items():
        nu_gap[g] += p

    weights = {s: w for s, w in zip(alphabet.symbols,
                                    alphabet.exact_weights)}

    def in_factor_set(word: tuple, m: int) -> bool:
        # factor sets are stored over words of length min(m, L): when the
        # separation exceeds the lookahead only the first L symbols matter
        return word[:min(m, L)] in rep.factor_sets[m]

    table = {}
    a = None
    passed = True
    for g in sorted(nu_gap):
        if g not in rep.factor_sets:
            continue
        prob = Fraction(0)
        for mid in itertools.product(alphabet.symbols, repeat=g):
            if not in_factor_set(mid, g):
                continue
            if any(in_factor_set(mid[j:], g - j) for j in range(1, g)):
                continue
            m = Fraction(1)
            for s in mid:
                m *= weights[s]
            prob += m
        ratio = None if prob == 0 else nu_gap[g] / prob
        table[g] = (nu_gap[g], prob, ratio)
        if nu_gap[g] > 0 and prob == 0:
            raise ValueError(f"gap mass at {g} with zero event probability")
        if ratio is not None and nu_gap[g] > 0:
            if a is None:
                a = ratio
            elif ratio != a:
                passed = False
    return passed, a, table


def conditional_next_symbol(law: ExactLaw, gap: int) -> dict:
    """Exact law of the symbol right after the later break of a pair with
    the given gap (the quantity that witnesses dependence when a future
    event pins a symbol beyond its own cycle)."""
    c = law.next_symbol_after_gap.get(gap)
    if not c:
        return {}
    tot = sum(c.values(), Fraction(0))
    return {s: m / tot for s, m in c.items()}
