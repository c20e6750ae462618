# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: batched SC decoding and packed GF(2) rank.

Mirrors kernels/reference.py operation for operation (same combine formulas,
same normalization points, same tie handling), so the two backends produce
interchangeable results.
"""

import numpy as np

BACKEND = "compiled"


cdef inline void _store_pair(double o0, double o1, double floor,
                             double* e0, double* e1) noexcept nogil:
    cdef double s = o0 + o1
    if s <= floor:
        e0[0] = 0.5
        e1[0] = 0.5
    else:
        e0[0] = o0 / s
        e1[0] = o1 / s


def sc_decode_batch(object pr0_in, object pr1_in, object pinned_mask_in,
                    object pinned_bits_in, double floor=1e-300,
                    bint collect_evidence=False):
    """See kernels.reference.sc_decode_batch; identical contract."""
    pr0_arr = np.ascontiguousarray(pr0_in, dtype=np.float64)
    pr1_arr = np.ascontiguousarray(pr1_in, dtype=np.float64)
    mask_arr = np.ascontiguousarray(pinned_mask_in, dtype=np.uint8)
    bits_arr = np.ascontiguousarray(pinned_bits_in, dtype=np.uint8)

    cdef double[:, ::1] pr0 = pr0_arr
    cdef double[:, ::1] pr1 = pr1_arr
    cdef unsigned char[::1] pinned_mask = mask_arr
    cdef unsigned char[:, ::1] pinned_bits = bits_arr

    cdef Py_ssize_t nbatch = pr0.shape[0]
    cdef Py_ssize_t n = pr0.shape[1]
    cdef int depth = 0
    while (1 << depth) < n:
        depth += 1
    if (1 << depth) != n:
        raise ValueError(f"block length must be a power of two, got {n}")
    if pr1.shape[0] != nbatch or pr1.shape[1] != n:
        raise ValueError("evidence arrays must share their shape")
    if pinned_mask.shape[0] != n or pinned_bits.shape[1] != n or pinned_bits.shape[0] != nbatch:
        raise ValueError("pinning arrays do not match the batch shape")

    w_hat_arr = np.empty((nbatch, n), dtype=np.uint8)
    trit_arr = np.empty((nbatch, n), dtype=np.uint8)
    post0_arr = np.empty((nbatch, n)) if collect_evidence else np.empty((1, 1))
    post1_arr = np.empty((nbatch, n)) if collect_evidence else np.empty((1, 1))
    cdef unsigned char[:, ::1] w_hat = w_hat_arr
    cdef unsigned char[:, ::1] trit = trit_arr
    cdef double[:, ::1] post0 = post0_arr
    cdef double[:, ::1] post1 = post1_arr

    # flat per-level scratch: level d occupies [(1<<d)-1, (1<<(d+1))-1)
    e0_arr = np.empty(2 * n - 1, dtype=np.float64)
    e1_arr = np.empty(2 * n - 1, dtype=np.float64)
    pend_arr = np.zeros(max(n - 1, 1), dtype=np.uint8)
    buf_a_arr = np.empty(n, dtype=np.uint8)
    buf_b_arr = np.empty(n, dtype=np.uint8)
    cdef double[::1] e0 = e0_arr
    cdef double[::1] e1 = e1_arr
    cdef unsigned char[::1] pend = pend_arr
    cdef unsigned char[::1] buf_a = buf_a_arr
    cdef unsigned char[::1] buf_b = buf_b_arr

    cdef Py_ssize_t b, i, l, s, width
    cdef int d, tau, lam, t
    cdef Py_ssize_t off, offc
    cdef double a0, a1, b0, b1, o0, o1, ev0r, ev1r
    cdef unsigned char u, w
    cdef unsigned char* inb
    cdef unsigned char* outb
    cdef unsigned char* tmp

    with nogil:
        for b in range(nbatch):
            for i in range(n):
                e0[n - 1 + i] = pr0[b, i]
                e1[n - 1 + i] = pr1[b, i]
            for l in range(n):
                if l == 0:
                    for d in range(depth - 1, -1, -1):
                        off = (1 << d) - 1
                        offc = (1 << (d + 1)) - 1
                        for s in range(1 << d):
                            a0 = e0[offc + 2 * s]
                            a1 = e1[offc + 2 * s]
                            b0 = e0[offc + 2 * s + 1]
                            b1 = e1[offc + 2 * s + 1]
                            o0 = 0.5 * (a0 * b0 + a1 * b1)
                            o1 = 0.5 * (a0 * b1 + a1 * b0)
                            _store_pair(o0, o1, floor, &e0[off + s], &e1[off + s])
                else:
                    tau = 0
                    while ((l >> tau) & 1) == 0:
                        tau += 1
                    off = (1 << tau) - 1
                    offc = (1 << (tau + 1)) - 1
                    for s in range(1 << tau):
                        a0 = e0[offc + 2 * s]
                        a1 = e1[offc + 2 * s]
                        b0 = e0[offc + 2 * s + 1]
                        b1 = e1[offc + 2 * s + 1]
                        u = pend[off + s]
                        if u:
                            o0 = 0.5 * a1 * b0
                            o1 = 0.5 * a0 * b1
                        else:
                            o0 = 0.5 * a0 * b0
                            o1 = 0.5 * a1 * b1
                        _store_pair(o0, o1, floor, &e0[off + s], &e1[off + s])
                    for d in range(tau - 1, -1, -1):
                        off = (1 << d) - 1
                        offc = (1 << (d + 1)) - 1
                        for s in range(1 << d):
                            a0 = e0[offc + 2 * s]
                            a1 = e1[offc + 2 * s]
                            b0 = e0[offc + 2 * s + 1]
                            b1 = e1[offc + 2 * s + 1]
                            o0 = 0.5 * (a0 * b0 + a1 * b1)
                            o1 = 0.5 * (a0 * b1 + a1 * b0)
                            _store_pair(o0, o1, floor, &e0[off + s], &e1[off + s])

                ev0r = e0[0]
                ev1r = e1[0]
                if collect_evidence:
                    post0[b, l] = ev0r
                    post1[b, l] = ev1r
                if ev0r > ev1r:
                    t = 0
                elif ev0r < ev1r:
                    t = 1
                else:
                    t = 2
                trit[b, l] = <unsigned char> t
                if pinned_mask[l]:
                    w = pinned_bits[b, l]
                else:
                    w = 1 if t == 1 else 0
                w_hat[b, l] = w

                inb = &buf_a[0]
                outb = &buf_b[0]
                inb[0] = w
                d = 0
                lam = <int> l
                width = 1
                while True:
                    if d == depth:
                        break
                    off = (1 << d) - 1
                    if (lam & 1) == 0:
                        for s in range(width):
                            pend[off + s] = inb[s]
                        break
                    for s in range(width):
                        outb[2 * s] = pend[off + s] ^ inb[s]
                        outb[2 * s + 1] = inb[s]
                    tmp = inb
                    inb = outb
                    outb = tmp
                    width <<= 1
                    d += 1
                    lam >>= 1

    if collect_evidence:
        return w_hat_arr, trit_arr, post0_arr, post1_arr
    return w_hat_arr, trit_arr


def rank_packed(object words_in, int ncols) -> int:
    """GF(2) rank of rows packed little-endian into uint64 words."""
    work = np.array(words_in, dtype=np.uint64, copy=True, order="C")
    if work.ndim != 2:
        raise ValueError("expected a 2-D packed matrix")
    cdef unsigned long long[:, ::1] m = work
    cdef Py_ssize_t nrows = m.shape[0]
    cdef Py_ssize_t nwords = m.shape[1]
    if nrows == 0 or ncols == 0:
        return 0
    if ncols > nwords * 64:
        raise ValueError("ncols exceeds the packed width")

    cdef Py_ssize_t r0 = 0, r, k, piv
    cdef int col, wi
    cdef unsigned long long mask, tmp

    with nogil:
        for col in range(ncols):
            wi = col >> 6
            mask = (<unsigned long long> 1) << (col & 63)
            piv = -1
            for r in range(r0, nrows):
                if m[r, wi] & mask:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != r0:
                for k in range(wi, nwords):
                    tmp = m[r0, k]
                    m[r0, k] = m[piv, k]
                    m[piv, k] = tmp
            for r in range(r0 + 1, nrows):
                if m[r, wi] & mask:
                    for k in range(wi, nwords):
                        m[r, k] ^= m[r0, k]
            r0 += 1
            if r0 == nrows:
                break
    return r0
