"""Break-time scanning framework.

A break time is an index n at which a past event H_n (readable from the
history up to n) and a future event F_n (readable from the driving symbols
strictly after n) occur together.  The scanner walks a process trajectory,
evaluates both events at every eligible index, thins occurrences greedily
from the left to honour a minimum separation, and cuts the driving sequence
into cycles carrying functional traces relative to the cycle start.

Future events are evaluated incrementally: an evaluator consumes
xi_{n+1}, xi_{n+2}, ... one at a time and reports a running verdict.  Once
it answers Occurs or Fails the answer is final; Undecided(h) means neither
was forced within lookahead h, and the configured policy decides whether to
treat that as failure (making the scanned event the horizon-truncated one,
which is itself a legitimate future event) or to escalate the horizon.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import math

from regenlab.core import DrivingStream, Window


class ContractError(RuntimeError):
    """An event or functional read data outside its declared window."""


class VerdictKind(enum.Enum):
    OCCURS = "occurs"
    FAILS = "fails"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class FutureVerdict:
    kind: VerdictKind
    horizon_used: int = 0

    @staticmethod
    def occurs() -> "FutureVerdict":
        return FutureVerdict(VerdictKind.OCCURS)

    @staticmethod
    def fails(lag: int = 0) -> "FutureVerdict":
        return FutureVerdict(VerdictKind.FAILS, lag)

    @staticmethod
    def undecided(horizon: int) -> "FutureVerdict":
        return FutureVerdict(VerdictKind.UNDECIDED, horizon)

    @property
    def decided(self) -> bool:
        return self.kind is not VerdictKind.UNDECIDED


class FutureEventSpec:
    """Stationary future event: the same evaluator applies at every base
    index.  `factory()` returns a fresh evaluator whose feed(symbol) method
    consumes xi_{n+1}, xi_{n+2}, ... and returns a FutureVerdict after each
    symbol.  Verdicts must be monotone: once decided, decided forever."""

    def __init__(self, factory: Callable[[], "FutureEvaluator"], name: str = ""):
        self.factory = factory
        self.name = name

    def begin(self) -> "FutureEvaluator":
        return self.factory()


class FutureEvaluator:
    """Base class for incremental future-event evaluators."""

    def feed(self, symbol) -> FutureVerdict:  # pragma: no cover - interface
        raise NotImplementedError


class PredicateFuture(FutureEvaluator):
    """Evaluator driven by a step function f(lag, symbol) -> verdict-or-None
    (None = keep feeding)."""

    def __init__(self, stepfn):
        self.stepfn = stepfn
        self.lag = 0

    def feed(self, symbol) -> FutureVerdict:
        self.lag += 1
        v = self.stepfn(self.lag, symbol)
        if v is None:
            return FutureVerdict.undecided(self.lag)
        return v


@dataclass
class PastEventSpec:
    """Past event H_n: a predicate over the trajectory and driving prefix up
    to n.  The scanner hands it a guarded view; any read past n raises
    ContractError, enforcing measurability."""

    predicate: Callable[[int, "HistoryView"], bool]
    name: str = ""

    def holds(self, n: int, view: "HistoryView") -> bool:
        return bool(self.predicate(n, view))


class HistoryView:
    """Read access to states X_0..X_n and symbols xi_1..xi_n only."""

    def __init__(self, states: Sequence, symbols: Sequence, n: int):
        self._states = states
        self._symbols = symbols
        self.n = n

    def state(self, k: int):
        if not (0 <= k <= self.n):
            raise ContractError(f"past event at n={self.n} read state {k}")
        return self._states[k]

    def symbol(self, k: int):
        if not (1 <= k <= self.n):
            raise ContractError(f"past event at n={self.n} read symbol {k}")
        return self._symbols[k - 1]


@dataclass(frozen=True)
class BreakConfig:
    horizon: int
    max_time: int
    min_separation: int = 1
    undecided_policy: str = "fail"     # "fail" | "escalate"
    escalation_cap: int = 0            # largest horizon tried when escalating

    def __post_init__(self):
        if self.horizon < 1 or self.max_time < 1:
            raise ValueError("horizon and max_time must be >= 1")
        if self.min_separation < 1:
            raise ValueError("min_separation must be >= 1")
        if self.undecided_policy not in ("fail", "escalate"):
            raise ValueError(f"unknown policy {self.undecided_policy!r}")


@dataclass
class Cycle:
    k: int
    tau_start: int
    tau_end: int
    segment: Window
    trace: list = field(default_factory=list)

    @property
    def gap(self) -> int:
        return self.tau_end - self.tau_start


@dataclass
class ScanResult:
    break_times: list
    cycles: list
    horizon: int
    min_separation: int
    evaluated: int = 0
    undecided_as_fail: int = 0
    escalations: int = 0
    delayed_segment_end: int | None = None  # tau_0, start of cycle bookkeeping

    @property
    def gaps(self) -> list:
        return [c.gap for c in self.cycles]

    def to_csv(self) -> str:
        lines = ["k,tau_start,tau_end,gap,trace"]
        for c in self.cycles:
            trace = json.dumps(c.trace, separators=(",", ":"))
            lines.append(f'{c.k},{c.tau_start},{c.tau_end},{c.gap},"{trace}"')
        return "\n".join(lines) + "\n"


class ProcessAdapter:
    """Minimal stepping interface: X_0 = initial(), X_n = step(X_{n-1},
    xi_n, n)."""

    def initial(self):  # pragma: no cover - interface
        raise NotImplementedError

    def step(self, state, symbol, n):  # pragma: no cover - interface
        raise NotImplementedError


def evaluate_future(spec: FutureEventSpec, stream: DrivingStream, n: int,
                    horizon: int) -> FutureVerdict:
    """Evaluate F_n on xi_{n+1}..xi_{n+horizon}."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    ev = spec.begin()
    verdict = FutureVerdict.undecided(0)
    for lag in range(1, horizon + 1):
        verdict = ev.feed(stream.sample_at(n + lag))
        if verdict.decided:
            return verdict
    return FutureVerdict.undecided(horizon)


def scan_break_times(process: ProcessAdapter, H: PastEventSpec | None,
                     F: FutureEventSpec, cfg: BreakConfig,
                     stream: DrivingStream,
                     trace_fn: Callable | None = None) -> ScanResult:
    """Find all n <= max_time with H_n and F_n occurring, thinned greedily
    from the left to enforce min_separation, and cut the driving sequence
    into cycles.

    trace_fn(i, state_at, state_base), when given, produces the functional
    trace entry for relative index i of each cycle.
    """
    N = cfg.max_time
    states = [process.initial()]
    symbols: list = []

    def ensure(upto: int):
        while len(symbols) < upto:
            k = len(symbols) + 1
            xi = stream.sample_at(k)
            symbols.append(xi)
            states.append(process.step(states[-1], xi, k))

    ensure(N)
    result = ScanResult([], [], cfg.horizon, cfg.min_separation)
    taus: list[int] = []
    next_eligible = 0
    for n in range(0, N + 1):
        if n < next_eligible:
            continue
        view = HistoryView(states, symbols, n)
        if H is not None and not H.holds(n, view):
            continue
        result.evaluated += 1
        horizon = cfg.horizon
        while True:
            ensure(min(n + horizon, N + horizon))
            verdict = evaluate_future(F, stream, n, horizon)
            if verdict.decided:
                break
            if (cfg.undecided_policy == "escalate"
                    and horizon * 2 <= cfg.escalation_cap):
                horizon *= 2
                result.escalations += 1
                continue
            if verdict.kind is VerdictKind.UNDECIDED:
                result.undecided_as_fail += 1
            break
        if verdict.kind is VerdictKind.OCCURS:
            taus.append(n)
            next_eligible = n + cfg.min_separation
    result.break_times = taus
    if not taus:
        return result
    result.delayed_segment_end = taus[0]
    ensure(min(taus[-1], N))
    for k in range(len(taus) - 1):
        a, b = taus[k], taus[k + 1]
        seg = Window(a + 1, b, tuple(symbols[a:b]))
        cyc = Cycle(k, a, b, seg)
        if trace_fn is not None:
            cyc.trace = [trace_fn(i, states[a + i], states[a]) for i in
                         range(1, b - a + 1)]
        result.cycles.append(cyc)
    return result


@dataclass
class CycleLaw:
    gap_pmf: dict
    e_prob: dict
    a_hat: float
    a_se: float
    ratios: dict
    flat_z: float  # largest standardized deviation of ratio from a_hat
    n_cycles: int


def cycle_law(cycles: Sequence[Cycle] | Sequence[int],
              e_estimator: Callable[[int], float],
              min_cycles: int = 100) -> CycleLaw:
    """Empirical cycle-length law against the predicted shape: the gap pmf
    should be proportional to n -> e_estimator(n), with one constant across
    the support.  Raises if mass appears where the predictor vanishes."""

    gaps = [c.gap if isinstance(c, Cycle) else int(c) for c in cycles]
    if len(gaps) < min_cycles:
        raise ValueError(f"need >= {min_cycles} cycles, got {len(gaps)}")
    m = len(gaps)
    counts = Counter(gaps)
    gap_pmf = {n: c / m for n, c in sorted(counts.items())}
    e_prob = {n: float(e_estimator(n)) for n in gap_pmf}
    for n, p in gap_pmf.items():
        if e_prob[n] <= 0.0 and p > 0.0:
            raise ValueError(
                f"gap pmf has mass {p} at n={n} where the event probability "
                "is 0: proportionality is violated")
    # proportionality constant by normalization over the observed support
    tot_e = sum(e_prob.values())
    a_hat = 1.0 / tot_e * sum(gap_pmf.values())
    a_se = math.sqrt(sum(p * (1 - p) for p in gap_pmf.values()) / m) / tot_e
    ratios = {n: gap_pmf[n] / e_prob[n] for n in gap_pmf}
    flat_z = 0.0
    for n, p in gap_pmf.items():
        se = math.sqrt(max(p * (1 - p), 1e-300) / m) / e_prob[n]
        if counts[n] >= 5:
            flat_z = max(flat_z, abs(ratios[n] - a_hat) / max(se, 1e-300))
    return CycleLaw(gap_pmf, e_prob, a_hat, a_se, ratios, flat_z, m)


def functional_traces(states: Sequence, cycles: Sequence[Cycle],
                      R: Callable, past_window: int = 0) -> list[list]:
    """Recompute per-cycle traces of a relative functional R(x_at, x_base).

    past_window declares how many pre-cycle states R may use (0 for
    functionals of the cycle alone); R receives a guarded accessor and
    raises ContractError if it reaches further back.
    """
    out = []
    for c in cycles:
        base = c.tau_start

        def guarded(k: int, base=base):
            if k < base - past_window or k > c.tau_end:
                raise ContractError(
                    f"functional read state {k} outside "
                    f"[{base - past_window}, {c.tau_end}]")
            return states[k]

        trace = []
        for i in range(1, c.gap + 1):
            trace.append(R(guarded(base + i), guarded(base)))
        out.append(trace)
    return out
