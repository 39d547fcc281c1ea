"""Compiled inner loops for path signatures and exit-time simulation.

Signatures are stored flat: levels 0..N concatenated, level k starting at
``off[k] = (d**k - 1) / (d - 1)``.
"""

import numba
import numpy as np


def level_offsets(d: int, N: int) -> np.ndarray:
    off = np.zeros(N + 2, dtype=np.int64)
    for k in range(N + 1):
        off[k + 1] = off[k] + d**k
    return off


@numba.njit(cache=True)
def mul_exp_inplace(sig, v, N, off, buf1, buf2):
    # sig <- sig (x) exp(v), Horner form per level, top level first so lower
    # levels are still the old values when read
    d = v.shape[0]
    for n in range(N, 0, -1):
        a_buf = buf1
        b_buf = buf2
        for a in range(d):
            a_buf[a] = sig[0] * v[a] / n
        tlen = d
        for k in range(1, n):
            base = off[k]
            inv = 1.0 / (n - k)
            for a in range(tlen):
                ta = (a_buf[a] + sig[base + a]) * inv
                for b in range(d):
                    b_buf[a * d + b] = ta * v[b]
            tlen *= d
            a_buf, b_buf = b_buf, a_buf
        base = off[n]
        for a in range(tlen):
            sig[base + a] += a_buf[a]


@numba.njit(cache=True)
def path_signature(points, N, off):
    d = points.shape[1]
    sig = np.zeros(off[N + 1])
    sig[0] = 1.0
    width = max(d ** N, 1)
    buf1 = np.empty(width)
    buf2 = np.empty(width)
    v = np.empty(d)
    for m in range(points.shape[0] - 1):
        for a in range(d):
            v[a] = points[m + 1, a] - points[m, a]
        mul_exp_inplace(sig, v, N, off, buf1, buf2)
    return sig


@numba.njit(cache=True)
def _exit_fraction(pos, inc, center, r2):
    # smallest t in [0, 1] with |pos + t inc - center| = r
    d = pos.shape[0]
    a = 0.0
    b = 0.0
    c = -r2
    for i in range(d):
        rel = pos[i] - center[i]
        a += inc[i] * inc[i]
        b += 2.0 * rel * inc[i]
        c += rel * rel
    if c >= 0.0 or a == 0.0:
        return 0.0
    disc = np.sqrt(b * b - 4.0 * a * c)
    if b >= 0.0:
        t = -2.0 * c / (b + disc)
    else:
        t = (-b + disc) / (2.0 * a)
    return min(max(t, 0.0), 1.0)


@numba.njit(cache=True, fastmath=True)
def mul_exp_many(sig, v, N, off, buf):
    # column-per-path version of mul_exp_inplace: sig (width, A), v (d, A),
    # buf (2, d**N, A); the innermost loop runs over paths
    d = v.shape[0]
    A = v.shape[1]
    for n in range(N, 0, -1):
        cur = 0
        for a in range(d):
            for p in range(A):
                buf[0, a, p] = sig[0, p] * v[a, p] / n
        tlen = d
        for k in range(1, n):
            base = off[k]
            inv = 1.0 / (n - k)
            nxt = 1 - cur
            for a in range(tlen):
                for b in range(d):
                    for p in range(A):
                        buf[nxt, a * d + b, p] = (buf[cur, a, p] + sig[base + a, p]) * inv * v[b, p]
            tlen *= d
            cur = nxt
        base = off[n]
        for a in range(tlen):
            for p in range(A):
                sig[base + a, p] += buf[cur, a, p]


@numba.njit(cache=True)
def _clip_steps(pos, inc, done, v, center, r2):
    # v <- the part of inc each path actually travels; marks exits
    d = pos.shape[0]
    A = pos.shape[1]
    for p in range(A):
        if done[p]:
            for i in range(d):
                v[i, p] = 0.0
            continue
        dist = 0.0
        for i in range(d):
            rel = pos[i, p] + inc[i, p] - center[i]
            dist += rel * rel
        t = 1.0
        if dist >= r2:
            t = _exit_fraction(pos[:, p], inc[:, p], center, r2)
            done[p] = True
        for i in range(d):
            v[i, p] = t * inc[i, p]
            pos[i, p] += v[i, p]


@numba.njit(cache=True)
def advance_block(pos, sig, done, steps, inc, center, r2, N, off):
    """Advance every path of the block by up to ``inc.shape[0]`` steps.

    pos (d, A), sig (width, A), inc (K, d, A).
    """
    d = pos.shape[0]
    A = pos.shape[1]
    buf = np.empty((2, max(d**N, 1), A))
    v = np.empty((d, A))
    for k in range(inc.shape[0]):
        for p in range(A):
            if not done[p]:
                steps[p] += 1
        _clip_steps(pos, inc[k], done, v, center, r2)
        mul_exp_many(sig, v, N, off, buf)
        alive = False
        for p in range(A):
            if not done[p]:
                alive = True
                break
        if not alive:
            break


@numba.njit(cache=True)
def advance_block_coupled(pos, sig, done, fpos, fsig, fdone, steps, inc, center, r2, N, off, ratio):
    # fine path takes every increment; coarse path takes sums of ``ratio`` of them
    d = pos.shape[0]
    A = pos.shape[1]
    buf = np.empty((2, max(d**N, 1), A))
    v = np.empty((d, A))
    coarse = np.empty((d, A))
    for k0 in range(0, inc.shape[0], ratio):
        coarse[:, :] = 0.0
        for k in range(k0, k0 + ratio):
            coarse += inc[k]
            _clip_steps(fpos, inc[k], fdone, v, center, r2)
            mul_exp_many(fsig, v, N, off, buf)
        for p in range(A):
            if not done[p]:
                steps[p] += 1
        _clip_steps(pos, coarse, done, v, center, r2)
        mul_exp_many(sig, v, N, off, buf)
        alive = False
        for p in range(A):
            if not done[p]:
                alive = True
                break
        if not alive:
            break
