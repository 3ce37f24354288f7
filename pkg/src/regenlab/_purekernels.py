"""Reference (numpy) implementations of the hot kernels.

This module is the semantic ground truth: the compiled extension in
``_ckernels.pyx`` reproduces every function here bit-for-bit (integer
outputs and uniform draws; the distance-correlation numerators agree up to
summation-order rounding).  All randomness is counter-based: the value
attached to (seed, index, lane) is a pure function of those three integers,
so any simulator may probe any index of the driving sequence at any time,
in any order, and replay it exactly.

Hash construction: chained murmur3 finalizer rounds,

    h0 = mix64(seed ^ GAMMA)
    h1 = mix64(h0 ^ u64(index))
    h2 = mix64(h1 ^ u64(lane))

with uniforms drawn as (h2 >> 11) * 2**-53 (exactly representable, so the
float is identical on every IEEE-754 platform).

Lane map used by the lattice kernels: a site at offset z <= 0 behind the
process's own right endpoint draws its descendant set from lane 1 + 2*(-z),
and (three-state only) its infection coin from lane 2 + 2*(-z') with z' the
offset behind the rightmost proposed site.  Lane 0 is reserved for scalar
per-index draws.
"""

from __future__ import annotations

import numpy as np

U64 = np.uint64
MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xFF51AFD7ED558CCD
_MIX_B = 0xC4CEB9FE1A85EC53
_INV53 = 2.0 ** -53

IS_COMPILED = False

_VA = U64(_MIX_A)
_VB = U64(_MIX_B)
_S33 = U64(33)
_S11 = U64(11)

DEAD = np.iinfo(np.int64).min


def mix64(x: int) -> int:
    """murmur3 64-bit finalizer on a python int (masked to 64 bits)."""
    x &= MASK64
    x ^= x >> 33
    x = (x * _MIX_A) & MASK64
    x ^= x >> 33
    x = (x * _MIX_B) & MASK64
    x ^= x >> 33
    return x


def raw64(seed: int, index: int, lane: int) -> int:
    """The canonical 64-bit word at (seed, index, lane)."""
    h = mix64((seed & MASK64) ^ GAMMA)
    h = mix64(h ^ (index & MASK64))
    h = mix64(h ^ (lane & MASK64))
    return h


def u01(seed: int, index: int, lane: int) -> float:
    """Uniform in [0,1) at (seed, index, lane); 53 significant bits."""
    return (raw64(seed, index, lane) >> 11) * _INV53


def _vmix(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> _S33)
    x = x * _VA
    x = x ^ (x >> _S33)
    x = x * _VB
    x = x ^ (x >> _S33)
    return x


def _seed_word(seed: int) -> int:
    return mix64((seed & MASK64) ^ GAMMA)


def u01_lanes(seed: int, index: int, lanes: np.ndarray) -> np.ndarray:
    """Uniforms for one (seed, index) across an array of lanes."""
    h1 = U64(mix64(_seed_word(seed) ^ (index & MASK64)))
    h2 = _vmix(h1 ^ np.asarray(lanes).astype(np.uint64))
    return (h2 >> _S11).astype(np.float64) * _INV53


def u01_indices(seed: int, indices: np.ndarray, lane: int) -> np.ndarray:
    """Uniforms for one (seed, lane) across an array of indices."""
    h1 = _vmix(U64(_seed_word(seed)) ^ np.asarray(indices).astype(np.uint64))
    h2 = _vmix(h1 ^ U64(lane & MASK64))
    return (h2 >> _S11).astype(np.float64) * _INV53


# ---------------------------------------------------------------------------
# random walk: future partial-sum minimum scan
# ---------------------------------------------------------------------------

def walk_future_mask(S: np.ndarray, horizon: int, strict: bool) -> np.ndarray:
    """Occurrence mask of the future event "partial sums starting at n stay
    nonnegative (weak) / positive (strict) for `horizon` steps".

    S is the path S_0..S_N (S[0] = 0).  Returns a uint8 mask over base
    indices n = 0..N-horizon with mask[n] = 1 iff
    min(S[n+1..n+horizon]) - S[n] >= 0 (weak) or > 0 (strict).
    """
    from scipy.ndimage import minimum_filter1d

    S = np.ascontiguousarray(S, dtype=np.float64)
    N = len(S) - 1
    H = int(horizon)
    if H < 1 or N < H:
        return np.zeros(0, dtype=np.uint8)
    f = minimum_filter1d(S[1:], size=H, origin=(H - 1) // 2, mode="nearest")
    a = (H - 1) // 2 - H // 2  # 0 for odd H, -1 for even H
    M = N - H
    w = f[np.arange(M + 1) - a]  # w[n] = min S[n+1..n+H]
    if strict:
        return (w > S[: M + 1]).astype(np.uint8)
    return (w >= S[: M + 1]).astype(np.uint8)


# ---------------------------------------------------------------------------
# two-state lattice growth process (descendant sets within {-1,+1})
# ---------------------------------------------------------------------------
#
# Configurations live on absolute positions in a fixed buffer; pos0 is the
# array index of the start position.  The draw u at (index, lane 1 + 2*(-z))
# for the site at offset z behind the process's right endpoint encodes its
# descendant set through the thresholds c0 <= c1 <= c2:
#     u <  c0        -> {}
#     c0 <= u < c1   -> {-1}
#     c1 <= u < c2   -> {+1}
#     u >= c2        -> {-1, +1}

def contact2_probe(seed: int, t0: int, T: int,
                   c0: float, c1: float, c2: float):
    """Run the process from a single site, started at time t0, for up to T
    steps.

    Returns (steps_alive, r_path): r_path[i] is the right endpoint at time
    t0+i relative to the start site (DEAD sentinel after extinction);
    steps_alive = T when alive at t0+T, else the last i with a nonempty
    state.
    """
    T = int(T)
    size = 2 * T + 4
    pos0 = T + 1
    cur = np.zeros(size, dtype=bool)
    cur[pos0] = True
    lo = hi = pos0
    r = 0
    r_path = np.full(T + 1, DEAD, dtype=np.int64)
    r_path[0] = 0
    for i in range(1, T + 1):
        idx = lo + np.nonzero(cur[lo:hi + 1])[0]
        u = u01_lanes(seed, t0 + i, 1 + 2 * (r - (idx - pos0)))
        plus = u >= c1
        minus = (u >= c0) & ((u < c1) | (u >= c2))
        cur[lo:hi + 1] = False
        new_p = idx[plus] + 1
        new_m = idx[minus] - 1
        if new_p.size == 0 and new_m.size == 0:
            return i - 1, r_path
        cur[new_p] = True
        cur[new_m] = True
        lo = int(min(new_p.min() if new_p.size else size,
                     new_m.min() if new_m.size else size))
        hi = int(max(new_p.max() if new_p.size else -1,
                     new_m.max() if new_m.size else -1))
        r = hi - pos0
        r_path[i] = r
    return T, r_path


def contact2_window_run(seed: int, t0: int, T: int, window: int,
                        c0: float, c1: float, c2: float):
    """Run the process started from a fully-occupied block of `window` sites
    ending at position 0, keeping only sites less than `window` behind the
    right endpoint (dropped mass is counted; edge statistics are insensitive
    to this for windows much wider than the run's fluctuations).

    Returns (r_path, dropped); r_path[i] is the right endpoint at time t0+i
    relative to its start position.
    """
    T = int(T)
    W = int(window)
    size = W + 2 * T + 6
    pos0 = W + T + 2
    cur = np.zeros(size, dtype=bool)
    cur[pos0 - W + 1:pos0 + 1] = True
    lo = pos0 - W + 1
    hi = pos0
    r = 0
    dropped = 0
    r_path = np.empty(T + 1, dtype=np.int64)
    r_path[0] = 0
    for i in range(1, T + 1):
        idx = lo + np.nonzero(cur[lo:hi + 1])[0]
        u = u01_lanes(seed, t0 + i, 1 + 2 * (r - (idx - pos0)))
        plus = u >= c1
        minus = (u >= c0) & ((u < c1) | (u >= c2))
        cur[lo:hi + 1] = False
        new_p = idx[plus] + 1
        new_m = idx[minus] - 1
        if new_p.size == 0 and new_m.size == 0:
            raise RuntimeError("windowed half-line run went fully extinct; "
                               "widen the window or check supercriticality")
        cur[new_p] = True
        cur[new_m] = True
        lo = int(min(new_p.min() if new_p.size else size,
                     new_m.min() if new_m.size else size))
        hi = int(max(new_p.max() if new_p.size else -1,
                     new_m.max() if new_m.size else -1))
        r = hi - pos0
        cut = hi - W  # sites at offsets >= window behind the endpoint go
        if lo <= cut:
            dropped += int(cur[lo:cut + 1].sum())
            cur[lo:cut + 1] = False
            lo = cut + 1
        r_path[i] = r
    return r_path, int(dropped)


# ---------------------------------------------------------------------------
# three-state lattice process with immunisation
# ---------------------------------------------------------------------------
#
# States: -1 never infected, 0 previously infected, 1 infected.  Infected
# sites emit descendant sets exactly as the two-state process (same lanes,
# offsets behind the rightmost infected site).  A proposed site that was
# never infected turns 1 surely; a previously-infected one turns 1 with
# probability q, decided by the coin at lane 2 + 2*(rp - y), rp being the
# rightmost proposed site.

def contact3_probe(seed: int, t0: int, T: int,
                   c0: float, c1: float, c2: float, q: float,
                   left_states: np.ndarray | None = None):
    """Run the three-state process started at time t0 from

        x = 0: 1,   x < 0: 0,   x > 0: -1,

    or with states at x = -1, -2, ... overridden by `left_states` (entry j
    is the state at x = -(j+1)).  Exact: the tracked span covers every site
    reachable in T steps.

    Returns (steps_alive, r_path) as in contact2_probe.
    """
    T = int(T)
    nleft = 0 if left_states is None else len(left_states)
    left = T + 2 + nleft
    size = left + T + 3
    pos0 = left
    st = np.zeros(size, dtype=np.int8)
    st[pos0] = 1
    st[pos0 + 1:] = -1
    lo = hi = pos0
    if left_states is not None:
        for j in range(nleft):
            st[pos0 - 1 - j] = left_states[j]
        lo = pos0 - nleft
    r = 0
    r_path = np.full(T + 1, DEAD, dtype=np.int64)
    r_path[0] = 0
    for i in range(1, T + 1):
        ones = lo + np.nonzero(st[lo:hi + 1] == 1)[0]
        if ones.size == 0:
            return i - 1, r_path
        u = u01_lanes(seed, t0 + i, 1 + 2 * (r - (ones - pos0)))
        plus = u >= c1
        minus = (u >= c0) & ((u < c1) | (u >= c2))
        prop = np.unique(np.concatenate([ones[plus] + 1, ones[minus] - 1]))
        st[ones] = 0
        if prop.size == 0:
            return i - 1, r_path
        rp = int(prop.max()) - pos0
        prev = st[prop]
        ui = u01_lanes(seed, t0 + i, 2 + 2 * (rp - (prop - pos0)))
        newly = prop[(prev == -1) | (ui < q)]
        if newly.size == 0:
            return i - 1, r_path
        st[newly] = 1
        r = int(newly.max()) - pos0
        lo = min(lo, int(prop.min()))
        hi = max(hi, int(prop.max()))
        r_path[i] = r
    return T, r_path


def contact3_window_run(seed: int, t0: int, T: int, window: int,
                        c0: float, c1: float, c2: float, q: float):
    """Run the three-state process started from the left-half-line state
    (1 at even x in [-window, 0], -1 elsewhere), truncated to `window` sites
    behind the running maximum of the right endpoint with the boundary rule
    "left of window = previously infected".

    Returns the right-endpoint path (absolute positions, start endpoint 0).
    """
    T = int(T)
    W = int(window)
    margin = 64
    size = W + 2 * margin
    st = np.full(size, -1, dtype=np.int8)
    base = -W   # absolute position of st[0]
    pos0 = W    # index of absolute position 0
    sites = np.arange(0, pos0 + 1)
    st[sites[((sites + base) % 2) == 0]] = 1
    lo, hi = 0, pos0
    r = 0
    rmax = 0
    r_path = np.full(T + 1, DEAD, dtype=np.int64)
    r_path[0] = 0
    msg = ("windowed half-line run lost all infected sites; widen the "
           "window or check parameters")
    for i in range(1, T + 1):
        ones = lo + np.nonzero(st[lo:hi + 1] == 1)[0]
        if ones.size == 0:
            raise RuntimeError(msg)
        u = u01_lanes(seed, t0 + i, 1 + 2 * (r - (ones + base)))
        plus = u >= c1
        minus = (u >= c0) & ((u < c1) | (u >= c2))
        prop = np.unique(np.concatenate([ones[plus] + 1, ones[minus] - 1]))
        prop = prop[(prop >= 0) & (prop < size)]
        st[ones] = 0
        if prop.size == 0:
            raise RuntimeError(msg)
        rp = int(prop.max()) + base
        prev = st[prop]
        ui = u01_lanes(seed, t0 + i, 2 + 2 * (rp - (prop + base)))
        newly = prop[(prev == -1) | (ui < q)]
        if newly.size == 0:
            raise RuntimeError(msg)
        st[newly] = 1
        r = int(newly.max()) + base
        lo = min(lo, int(prop.min()))
        hi = max(hi, int(prop.max()))
        r_path[i] = r
        if r > rmax:
            rmax = r
            top = base + size - 1
            if rmax + margin > top:
                shift = rmax + margin - top
                st[:size - shift] = st[shift:]
                st[size - shift:] = -1
                base += shift
                lo = max(lo - shift, 0)
                hi = max(hi - shift, 0)
                # sites shifted out on the left are forgotten as state 0
    return r_path


# ---------------------------------------------------------------------------
# distance-correlation permutation kernel
# ---------------------------------------------------------------------------

def dcor_perm_numerators(A: np.ndarray, B: np.ndarray,
                         perms: np.ndarray) -> np.ndarray:
    """Sum_ij A[i,j] * B[p[i], p[j]] for each permutation row p."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    out = np.empty(len(perms), dtype=np.float64)
    for k in range(len(perms)):
        p = np.asarray(perms[k], dtype=np.intp)
        out[k] = float(np.einsum("ij,ij->", A, B[np.ix_(p, p)]))
    return out
