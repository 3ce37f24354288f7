"""Reproducible i.i.d. driving streams with indexed access and shift views.

A stream assigns to every index n >= 1 (and lane, for structured drivers) a
symbol that is a pure function of (seed, law, origin_offset + n).  Because
generation is counter-based there is no sequential state: shifting is O(1)
and the future of the stream can be probed arbitrarily often without
consuming anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from regenlab import backend


class LawError(ValueError):
    """Invalid law specification."""


@dataclass(frozen=True)
class Alphabet:
    """Finite law over abstract symbols.

    Weights may be floats or Fractions; Fractions are kept exact for use by
    the enumeration oracle, while sampling always goes through float
    thresholds.
    """

    symbols: tuple
    weights: tuple
    _cums: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, symbols: Sequence, weights: Sequence):
        symbols = tuple(symbols)
        weights = tuple(weights)
        if len(symbols) != len(weights) or not symbols:
            raise LawError("symbols and weights must be equal-length, nonempty")
        if any(w < 0 for w in weights):
            raise LawError("weights must be nonnegative")
        total = sum(weights)
        if isinstance(total, Fraction) or isinstance(total, int):
            if Fraction(total) != 1:
                raise LawError(f"weights must sum to 1 exactly, got {total}")
        elif abs(float(total) - 1.0) > 1e-12:
            raise LawError(f"weights must sum to 1 within 1e-12, got {total}")
        if max(weights) <= 0:
            raise LawError("at least one symbol needs positive weight")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "weights", weights)
        cums = np.cumsum(np.asarray([float(w) for w in weights]))
        cums[-1] = 1.0
        object.__setattr__(self, "_cums", cums)

    @property
    def exact_weights(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w) for w in self.weights)

    def index_from_u(self, u: float) -> int:
        return int(np.searchsorted(self._cums, u, side="right"))

    def symbol_from_u(self, u):
        return self.symbols[self.index_from_u(u)]

    def indices_from_u(self, u: np.ndarray) -> np.ndarray:
        return np.searchsorted(self._cums, u, side="right").astype(np.int64)


@dataclass(frozen=True)
class ContinuousLaw:
    """Named continuous (or countable) law sampled by inverse CDF from one
    uniform, so oracle extrapolations and the simulator share a code path."""

    kind: str          # "uniform" | "exponential" | "geometric"
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "exponential", "geometric"):
            raise LawError(f"unknown law kind {self.kind!r}")
        if self.kind == "exponential" and self.param <= 0:
            raise LawError("exponential rate must be positive")
        if self.kind == "geometric" and not (0 < self.param < 1):
            raise LawError("geometric ratio must lie in (0,1)")

    def symbol_from_u(self, u: float):
        if self.kind == "uniform":
            return u
        if self.kind == "exponential":
            return -math.log1p(-u) / self.param
        # geometric on {1,2,...} with P(xi > i) = param**i
        return 1 + int(math.log1p(-u) // math.log(self.param))

    def values_from_u(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            return np.asarray(u, dtype=np.float64)
        if self.kind == "exponential":
            return -np.log1p(-np.asarray(u)) / self.param
        return 1 + (np.log1p(-np.asarray(u)) //
                    math.log(self.param)).astype(np.int64)


Law = Alphabet | ContinuousLaw


@dataclass(frozen=True)
class Window:
    """Materialized slice xi_lo..xi_hi of a stream (inclusive ends)."""

    lo: int
    hi: int
    values: tuple

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")
        if len(self.values) != self.hi - self.lo + 1:
            raise ValueError("window length mismatch")

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class DrivingStream:
    """Indexed i.i.d. sequence {xi_n}_{n>=1} with O(1) shift semantics."""

    seed: int
    law: Law
    origin_offset: int = 0

    def sample_at(self, n: int):
        if n < 1:
            raise IndexError(f"stream indices start at 1, got {n}")
        u = backend.u01(self.seed, self.origin_offset + n, 0)
        return self.law.symbol_from_u(u)

    def uniform_at(self, n: int, lane: int = 0) -> float:
        """Raw uniform behind index n; lanes > 0 address per-index fields of
        structured drivers (lattice offsets, coin flips, ...)."""
        if n < 1:
            raise IndexError(f"stream indices start at 1, got {n}")
        return backend.u01(self.seed, self.origin_offset + n, lane)

    def shift(self, k: int) -> "DrivingStream":
        return replace(self, origin_offset=self.origin_offset + k)

    def window(self, m: int, n: int) -> Window:
        if m < 1:
            raise IndexError(f"stream indices start at 1, got {m}")
        if m > n:
            raise ValueError(f"window requires m <= n, got [{m}, {n}]")
        return Window(m, n, tuple(self.sample_at(i) for i in range(m, n + 1)))

    # vectorized accessors ---------------------------------------------------

    def samples(self, m: int, n: int) -> np.ndarray:
        """Values at indices m..n as an array (numeric laws only)."""
        if m < 1 or m > n:
            raise ValueError(f"bad index range [{m}, {n}]")
        idx = np.arange(self.origin_offset + m, self.origin_offset + n + 1,
                        dtype=np.int64)
        u = backend.u01_indices(self.seed, idx, 0)
        if isinstance(self.law, Alphabet):
            ksym = self.law.indices_from_u(u)
            return np.asarray(self.law.symbols, dtype=np.float64)[ksym]
        return self.law.values_from_u(u)

    def uniforms(self, m: int, n: int, lane: int = 0) -> np.ndarray:
        if m < 1 or m > n:
            raise ValueError(f"bad index range [{m}, {n}]")
        idx = np.arange(self.origin_offset + m, self.origin_offset + n + 1,
                        dtype=np.int64)
        return backend.u01_indices(self.seed, idx, lane)


def law_from_config(spec: dict) -> Law:
    """Build a law from its config-file form, e.g.

        {type = "finite", symbols = [...], weights = [...]}
        {type = "geometric", r = 0.5}
        {type = "exponential", rate = 1.0}
        {type = "uniform"}
    """
    if "type" not in spec:
        raise LawError("law spec needs a 'type' field")
    kind = spec["type"]
    if kind == "finite":
        return Alphabet(spec["symbols"], spec["weights"])
    if kind == "geometric":
        return ContinuousLaw("geometric", float(spec["r"]))
    if kind == "exponential":
        return ContinuousLaw("exponential", float(spec.get("rate", 1.0)))
    if kind == "uniform":
        return ContinuousLaw("uniform")
    raise LawError(f"unknown law type {kind!r}")
