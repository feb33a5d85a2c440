"""numba kernels for the two hot loops: Gray-code walks and MT streams."""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True)
def _weight(cur):
    s = np.uint64(0)
    for i in range(cur.shape[0]):
        s += _popcount(cur[i])
    return np.int64(s)


@njit(cache=True, nogil=True)
def gray_walk(rows, s_lo, s_hi, keep):
    """Walk Gray codes g(s) = s ^ (s >> 1) for s in [s_lo, s_hi), s_lo >= 1.

    Returns (min weight, patterns attaining it (at most ``keep``), number of
    patterns attaining it).  One row xor per step.
    """
    vp, W = rows.shape
    cur = np.zeros(W, dtype=np.uint64)
    g = s_lo ^ (s_lo >> 1)
    for b in range(vp):
        if (g >> b) & 1:
            for i in range(W):
                cur[i] ^= rows[b, i]
    best = np.int64(1) << 62
    found = np.empty(keep, dtype=np.int64)
    nfound = 0
    nbest = np.int64(0)
    s = s_lo
    while True:
        wt = _weight(cur)
        if wt < best:
            best = wt
            nfound = 0
            nbest = 0
        if wt == best:
            nbest += 1
            if nfound < keep:
                found[nfound] = g
                nfound += 1
        s += 1
        if s >= s_hi:
            break
        b = 0
        while not (s >> b) & 1:
            b += 1
        g ^= np.int64(1) << b
        for i in range(W):
            cur[i] ^= rows[b, i]
    return best, found[:nfound].copy(), nbest


@njit(cache=True, nogil=True)
def sample_min_weight(rows, nsamples, seed, keep):
    """Minimum weight over uniformly drawn nonzero coefficient patterns."""
    vp, W = rows.shape
    state = np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15) + np.uint64(1)
    mask = (np.uint64(1) << np.uint64(vp)) - np.uint64(1)
    cur = np.zeros(W, dtype=np.uint64)
    best = np.int64(1) << 62
    found = np.empty(keep, dtype=np.int64)
    nfound = 0
    for _ in range(nsamples):
        g = np.uint64(0)
        while g == 0:
            # xorshift64*
            state ^= state >> np.uint64(12)
            state ^= state << np.uint64(25)
            state ^= state >> np.uint64(27)
            g = ((state * np.uint64(0x2545F4914F6CDD1D)) >> np.uint64(17)) & mask
        cur[:] = 0
        for b in range(vp):
            if (g >> np.uint64(b)) & np.uint64(1):
                for i in range(W):
                    cur[i] ^= rows[b, i]
        wt = _weight(cur)
        if wt < best:
            best = wt
            nfound = 0
        if wt == best and nfound < keep:
            found[nfound] = np.int64(g)
            nfound += 1
    return best, found[:nfound].copy()


# --- MT19937 / MEMT19937-II streaming -------------------------------------

_N = 624
_M = 397
_UPPER = np.uint32(0x80000000)
_LOWER = np.uint32(0x7FFFFFFF)
_MATRIX_A = np.uint32(0x9908B0DF)


@njit(inline="always")
def _mix(a, b):
    y = (a & _UPPER) | (b & _LOWER)
    return (y >> np.uint32(1)) ^ ((np.uint32(0) - (y & np.uint32(1))) & _MATRIX_A)


@njit(inline="always")
def _twist(prev, cur):
    """cur <- next block of raw words after prev (branch-free, split loops)."""
    for k in range(_N - _M):
        cur[k] = prev[k + _M] ^ _mix(prev[k], prev[k + 1])
    for k in range(_N - _M, _N - 1):
        cur[k] = cur[k + _M - _N] ^ _mix(prev[k], prev[k + 1])
    cur[_N - 1] = cur[_M - 1] ^ _mix(prev[_N - 1], cur[0])


@njit(inline="always")
def _output(kind, prev, cur, j):
    if kind == 0:
        y = cur[j]
        y ^= y >> np.uint32(11)
        y ^= (y << np.uint32(7)) & np.uint32(0x9D2C5680)
        y ^= (y << np.uint32(15)) & np.uint32(0xEFC60000)
        y ^= y >> np.uint32(18)
        return np.uint32(y)
    a = cur[j - 473] if j >= 473 else prev[j + _N - 473]
    b = cur[j - 588] if j >= 588 else prev[j + _N - 588]
    # numba widens uint32 shifts to 64 bits; cast back after each left shift
    z = np.uint32(cur[j] ^ (a & np.uint32(0xB219BEAB)))
    z = np.uint32(z ^ (z << np.uint32(8)))
    z = np.uint32(z ^ (z << np.uint32(14)))
    return np.uint32(z ^ (b & np.uint32(0x56BDE52A)))


@njit(cache=True, nogil=True)
def mt_words(kind, seed_block, count):
    """First ``count`` output words from a seeded 624-word array."""
    prev = seed_block.copy()
    cur = np.empty(_N, dtype=np.uint32)
    out = np.empty(count, dtype=np.uint32)
    q = 0
    while q < count:
        _twist(prev, cur)
        for j in range(_N):
            if q >= count:
                break
            out[q] = _output(kind, prev, cur, j)
            q += 1
        prev, cur = cur, prev
    return out


@njit(cache=True, nogil=True)
def mt_lagged_boxes(kind, seed_block, n, lags, vbits):
    """Box indices of the points (u_{s i + j_1}, ..., u_{s i + j_t}), s = j_t + 1.

    Each coordinate contributes its top ``vbits`` bits; the first lag is the
    most significant digit.  Outputs are generated block by block and only
    the needed ones are transformed.
    """
    t = lags.shape[0]
    stride = lags[t - 1] + 1
    shift = np.uint32(32 - vbits)
    boxes = np.empty(n, dtype=np.uint64)
    prev = seed_block.copy()
    cur = np.empty(_N, dtype=np.uint32)
    pt = 0
    m = 0
    acc = np.uint64(0)
    target = lags[0]
    block_start = 0
    while pt < n:
        _twist(prev, cur)
        block_end = block_start + _N
        while target < block_end:
            y = _output(kind, prev, cur, target - block_start)
            acc = (acc << np.uint64(vbits)) | np.uint64(y >> shift)
            m += 1
            if m == t:
                boxes[pt] = acc
                pt += 1
                acc = np.uint64(0)
                m = 0
                if pt == n:
                    break
            target = stride * pt + lags[m]
        prev, cur = cur, prev
        block_start = block_end
    return boxes

