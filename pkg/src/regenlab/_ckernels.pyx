# cython: language_level=3
"""Compiled hot kernels.

Must match `_purekernels` exactly: integer outputs bit-for-bit, uniform
draws bit-for-bit (the float construction is exact in IEEE-754), and the
distance-correlation numerators up to summation-order rounding.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memset

cnp.import_array()

IS_COMPILED = True

ctypedef unsigned long long u64

cdef double INV53 = 2.0 ** -53
cdef u64 GAMMA_C = 0x9E3779B97F4A7C15ULL
cdef long long DEAD_C = -9223372036854775807LL - 1

DEAD = np.iinfo(np.int64).min
MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


cdef inline u64 c_mix64(u64 x) nogil:
    x ^= x >> 33
    x *= 0xFF51AFD7ED558CCDULL
    x ^= x >> 33
    x *= 0xC4CEB9FE1A85EC53ULL
    x ^= x >> 33
    return x


cdef inline double c_u01(u64 h1, u64 lane) nogil:
    return <double>(c_mix64(h1 ^ lane) >> 11) * INV53


cdef inline u64 c_seed_word(u64 seed) nogil:
    return c_mix64(seed ^ GAMMA_C)


def mix64(x):
    return int(c_mix64(<u64>(x & MASK64)))


def raw64(seed, index, lane):
    cdef u64 h = c_seed_word(<u64>(seed & MASK64))
    h = c_mix64(h ^ <u64>(index & MASK64))
    h = c_mix64(h ^ <u64>(lane & MASK64))
    return int(h)


def u01(seed, index, lane):
    return (raw64(seed, index, lane) >> 11) * INV53


def u01_lanes(seed, index, lanes):
    cdef u64 h1 = c_mix64(c_seed_word(<u64>(seed & MASK64)) ^ <u64>(index & MASK64))
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ln = \
        np.ascontiguousarray(lanes).astype(np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = \
        np.empty(ln.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(ln.shape[0]):
        out[i] = c_u01(h1, ln[i])
    return out


def u01_indices(seed, indices, lane):
    cdef u64 sw = c_seed_word(<u64>(seed & MASK64))
    cdef u64 lu = <u64>(lane & MASK64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ix = \
        np.ascontiguousarray(indices).astype(np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = \
        np.empty(ix.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(ix.shape[0]):
        out[i] = c_u01(c_mix64(sw ^ ix[i]), lu)
    return out


def walk_future_mask(S, horizon, strict):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s = \
        np.ascontiguousarray(S, dtype=np.float64)
    cdef Py_ssize_t N = s.shape[0] - 1
    cdef Py_ssize_t H = int(horizon)
    if H < 1 or N < H:
        return np.zeros(0, dtype=np.uint8)
    cdef Py_ssize_t M = N - H
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = \
        np.zeros(M + 1, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] deq = \
        np.empty(N + 1, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 0  # deque of indices, values increasing
    cdef Py_ssize_t j, n
    cdef int want_strict = 1 if strict else 0
    cdef double wmin
    for j in range(1, N + 1):
        while tail > head and s[deq[tail - 1]] >= s[j]:
            tail -= 1
        deq[tail] = j
        tail += 1
        n = j - H
        if n >= 0:
            while deq[head] < n + 1:
                head += 1
            wmin = s[deq[head]]
            if want_strict:
                mask[n] = 1 if wmin > s[n] else 0
            else:
                mask[n] = 1 if wmin >= s[n] else 0
    return mask


def contact2_probe(seed, t0, T, double c0, double c1, double c2):
    cdef Py_ssize_t TT = int(T)
    cdef Py_ssize_t size = 2 * TT + 4
    cdef Py_ssize_t pos0 = TT + 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] cur = np.zeros(size, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] nxt = np.zeros(size, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r_path = \
        np.full(TT + 1, DEAD, dtype=np.int64)
    cdef u64 sw = c_seed_word(<u64>(seed & MASK64))
    cdef long long t0c = int(t0)
    cdef Py_ssize_t lo = pos0, hi = pos0, nlo = 0, nhi = 0
    cdef Py_ssize_t x, i
    cdef long long r = 0
    cdef int alive
    cdef double u
    cdef u64 h1, lane
    cdef int plus, minus
    cur[pos0] = 1
    r_path[0] = 0
    for i in range(1, TT + 1):
        h1 = c_mix64(sw ^ <u64>(t0c + i))
        alive = 0
        nlo = size
        nhi = -1
        for x in range(lo, hi + 1):
            if cur[x]:
                lane = <u64>(1 + 2 * (r - (x - pos0)))
                u = c_u01(h1, lane)
                plus = 1 if u >= c1 else 0
                minus = 1 if (u >= c0 and (u < c1 or u >= c2)) else 0
                if plus:
                    nxt[x + 1] = 1
                    alive = 1
                    if x + 1 < nlo: nlo = x + 1
                    if x + 1 > nhi: nhi = x + 1
                if minus:
                    nxt[x - 1] = 1
                    alive = 1
                    if x - 1 < nlo: nlo = x - 1
                    if x - 1 > nhi: nhi = x - 1
        memset(&cur[lo], 0, hi - lo + 1)
        if not alive:
            return i - 1, r_path
        cur, nxt = nxt, cur
        lo = nlo
        hi = nhi
        r = hi - pos0
        r_path[i] = r
    return TT, r_path


def contact2_window_run(seed, t0, T, window, double c0, double c1, double c2):
    cdef Py_ssize_t TT = int(T)
    cdef Py_ssize_t W = int(window)
    cdef Py_ssize_t size = W + 2 * TT + 6
    cdef Py_ssize_t pos0 = W + TT + 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] cur = np.zeros(size, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] nxt = np.zeros(size, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r_path = \
        np.empty(TT + 1, dtype=np.int64)
    cdef u64 sw = c_seed_word(<u64>(seed & MASK64))
    cdef long long t0c = int(t0)
    cdef Py_ssize_t lo, hi, nlo, nhi, x, i, cut
    cdef long long r = 0, dropped = 0
    cdef int alive
    cdef double u
    cdef u64 h1
    cdef int plus, minus
    for x in range(pos0 - W + 1, pos0 + 1):
        cur[x] = 1
    lo = pos0 - W + 1
    hi = pos0
    r_path[0] = 0
    for i in range(1, TT + 1):
        h1 = c_mix64(sw ^ <u64>(t0c + i))
        alive = 0
        nlo = size
        nhi = -1
        for x in range(lo, hi + 1):
            if cur[x]:
                u = c_u01(h1, <u64>(1 + 2 * (r - (x - pos0))))
                plus = 1 if u >= c1 else 0
                minus = 1 if (u >= c0 and (u < c1 or u >= c2)) else 0
                if plus:
                    nxt[x + 1] = 1
                    alive = 1
                    if x + 1 < nlo: nlo = x + 1
                    if x + 1 > nhi: nhi = x + 1
                if minus:
                    nxt[x - 1] = 1
                    alive = 1
                    if x - 1 < nlo: nlo = x - 1
                    if x - 1 > nhi: nhi = x - 1
        memset(&cur[lo], 0, hi - lo + 1)
        if not alive:
            raise RuntimeError("windowed half-line run went fully extinct; "
                               "widen the window or check supercriticality")
        cur, nxt = nxt, cur
        lo = nlo
        hi = nhi
        r = hi - pos0
        cut = hi - W  # drop sites at offsets >= window behind the endpoint
        if lo <= cut:
            for x in range(lo, cut + 1):
                if cur[x]:
                    dropped += 1
                    cur[x] = 0
            lo = cut + 1
        r_path[i] = r
    return r_path, int(dropped)


def contact3_probe(seed, t0, T, double c0, double c1, double c2, double q,
                   left_states=None):
    cdef Py_ssize_t TT = int(T)
    cdef Py_ssize_t nleft = 0
    if left_states is not None:
        nleft = len(left_states)
    cdef Py_ssize_t left = TT + 2 + nleft
    cdef Py_ssize_t size = left + TT + 3
    cdef Py_ssize_t pos0 = left
    cdef cnp.ndarray[cnp.int8_t, ndim=1] st = np.zeros(size, dtype=np.int8)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] prev = np.zeros(size, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r_path = \
        np.full(TT + 1, DEAD, dtype=np.int64)
    cdef u64 sw = c_seed_word(<u64>(seed & MASK64))
    cdef long long t0c = int(t0)
    cdef Py_ssize_t lo = pos0, hi = pos0, x, i, j
    cdef Py_ssize_t plo, phi
    cdef long long r = 0, rp
    cdef double u
    cdef u64 h1
    cdef int plus, minus, any_one
    st[pos0] = 1
    for x in range(pos0 + 1, size):
        st[x] = -1
    if left_states is not None:
        for j in range(nleft):
            st[pos0 - 1 - j] = left_states[j]
        lo = pos0 - nleft
    r_path[0] = 0
    for i in range(1, TT + 1):
        h1 = c_mix64(sw ^ <u64>(t0c + i))
        # pass 1: proposals from infected sites into prev[] as marker 2
        plo = size
        phi = -1
        any_one = 0
        for x in range(lo - 1 if lo > 0 else 0, hi + 2):
            prev[x] = 0
        for x in range(lo, hi + 1):
            if st[x] == 1:
                any_one = 1
                u = c_u01(h1, <u64>(1 + 2 * (r - (x - pos0))))
                plus = 1 if u >= c1 else 0
                minus = 1 if (u >= c0 and (u < c1 or u >= c2)) else 0
                if plus:
                    prev[x + 1] = 1
                    if x + 1 < plo: plo = x + 1
                    if x + 1 > phi: phi = x + 1
                if minus:
                    prev[x - 1] = 1
                    if x - 1 < plo: plo = x - 1
                    if x - 1 > phi: phi = x - 1
                st[x] = 0  # infected site recovers (parity: never re-proposed)
        if not any_one or phi < 0:
            return i - 1, r_path
        rp = phi - pos0
        any_one = 0
        r = DEAD_C
        for x in range(plo, phi + 1):
            if prev[x]:
                if st[x] == -1:
                    st[x] = 1
                    any_one = 1
                    r = x - pos0
                else:
                    u = c_u01(h1, <u64>(2 + 2 * (rp - (x - pos0))))
                    if u < q:
                        st[x] = 1
                        any_one = 1
                        r = x - pos0
        if not any_one:
            return i - 1, r_path
        if plo < lo: lo = plo
        if phi > hi: hi = phi
        r_path[i] = r
    return TT, r_path


def contact3_window_run(seed, t0, T, window,
                        double c0, double c1, double c2, double q):
    cdef Py_ssize_t TT = int(T)
    cdef Py_ssize_t W = int(window)
    cdef Py_ssize_t margin = 64
    cdef Py_ssize_t size = W + 2 * margin
    cdef cnp.ndarray[cnp.int8_t, ndim=1] st = np.full(size, -1, dtype=np.int8)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] mark = np.zeros(size, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r_path = \
        np.full(TT + 1, DEAD, dtype=np.int64)
    cdef u64 sw = c_seed_word(<u64>(seed & MASK64))
    cdef long long t0c = int(t0)
    cdef long long base = -W          # absolute position of st[0]
    cdef long long r = 0, rmax = 0, rp
    cdef Py_ssize_t pos0 = W, x, i, shift
    cdef Py_ssize_t lo, hi, plo, phi
    cdef double u
    cdef u64 h1
    cdef int plus, minus, any_one
    for x in range(0, pos0 + 1):
        if ((x + base) % 2) == 0:
            st[x] = 1
        else:
            st[x] = -1
    lo = 0
    hi = pos0
    r_path[0] = 0
    for i in range(1, TT + 1):
        h1 = c_mix64(sw ^ <u64>(t0c + i))
        plo = size
        phi = -1
        any_one = 0
        for x in range(lo - 1 if lo > 0 else 0,
                       hi + 2 if hi + 2 <= size else size):
            mark[x] = 0
        for x in range(lo, hi + 1):
            if st[x] == 1:
                any_one = 1
                u = c_u01(h1, <u64>(1 + 2 * (r - (x + base))))
                plus = 1 if u >= c1 else 0
                minus = 1 if (u >= c0 and (u < c1 or u >= c2)) else 0
                if plus and x + 1 < size:
                    mark[x + 1] = 1
                    if x + 1 < plo: plo = x + 1
                    if x + 1 > phi: phi = x + 1
                if minus and x - 1 >= 0:
                    mark[x - 1] = 1
                    if x - 1 < plo: plo = x - 1
                    if x - 1 > phi: phi = x - 1
                st[x] = 0
        if not any_one or phi < 0:
            raise RuntimeError("windowed half-line run lost all infected "
                               "sites; widen the window or check parameters")
        rp = phi + base
        any_one = 0
        r = DEAD_C
        for x in range(plo, phi + 1):
            if mark[x]:
                if st[x] == -1:
                    st[x] = 1
                    any_one = 1
                    r = x + base
                else:
                    u = c_u01(h1, <u64>(2 + 2 * (rp - (x + base))))
                    if u < q:
                        st[x] = 1
                        any_one = 1
                        r = x + base
        if not any_one:
            raise RuntimeError("windowed half-line run lost all infected "
                               "sites; widen the window or check parameters")
        if plo < lo: lo = plo
        if phi > hi: hi = phi
        r_path[i] = r
        if r > rmax:
            rmax = r
            if rmax + margin > base + size - 1:
                shift = rmax + margin - (base + size - 1)
                for x in range(0, size - shift):
                    st[x] = st[x + shift]
                for x in range(size - shift, size):
                    st[x] = -1
                base += shift
                lo = lo - shift if lo >= shift else 0
                hi = hi - shift if hi >= shift else 0
                # sites shifted out on the left are forgotten as state 0
    return r_path


def dcor_perm_numerators(A, B, perms):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Ac = \
        np.ascontiguousarray(A, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Bc = \
        np.ascontiguousarray(B, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] P = \
        np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t nperm = P.shape[0]
    cdef Py_ssize_t n = Ac.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = \
        np.empty(nperm, dtype=np.float64)
    cdef Py_ssize_t k, i, j
    cdef double acc
    cdef cnp.int64_t pi
    for k in range(nperm):
        acc = 0.0
        for i in range(n):
            pi = P[k, i]
            for j in range(n):
                acc += Ac[i, j] * Bc[pi, P[k, j]]
        out[k] = acc
    return out
