"""Pure-numpy kernels: batched successive-cancellation decoding and packed
GF(2) rank.  This is the fallback backend; the compiled extension performs
the same arithmetic in the same order, so results are interchangeable.

The decoder keeps one evidence pair per subsystem per level.  At global
step l the subsystem at depth d refreshes exactly when 2^d divides l, with
the parity of l >> d selecting the odd (f) or even (g) combine; decisions
cascade back down through pending-bit buffers.  Everything vectorizes over
the trial axis and over subsystems within a level.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_FLOOR = 1e-300


def _normalize(o0: np.ndarray, o1: np.ndarray, floor: float):
    s = o0 + o1
    bad = s <= floor
    if bad.any():
        o0 = np.where(bad, 0.5, o0)
        o1 = np.where(bad, 0.5, o1)
        s = np.where(bad, 1.0, s)
    return o0 / s, o1 / s


def sc_decode_batch(pr0, pr1, pinned_mask, pinned_bits, floor: float = _FLOOR,
                    collect_evidence: bool = False):
    """Batched successive-cancellation pass over per-position evidence.

    Parameters
    ----------
    pr0, pr1 : float64 arrays (B, n)
        Normalized channel evidence for codeword bit values 0 and 1.
    pinned_mask : uint8 array (n,)
        Positions whose input bit is known (frozen or genie-supplied).
    pinned_bits : uint8 array (B, n)
        The known values; only read where pinned_mask is set.
    floor : float
        Evidence-mass floor; a combine whose total mass falls at or below
        it yields the uninformative pair (1/2, 1/2).
    collect_evidence : bool
        Also return the normalized per-index decision evidence (debug aid).

    Returns
    -------
    w_hat : uint8 array (B, n)
        Successive decisions, pinned positions forced to their known bits.
    trit : uint8 array (B, n)
        Raw evidence comparison before pinning: 0 if ev0 > ev1, 1 if
        ev0 < ev1, 2 on a tie.  The unpinned decision is (trit == 1).
    post0, post1 : float64 arrays (B, n), only with collect_evidence
        The evidence pair each decision was taken from.
    """
    pr0 = np.ascontiguousarray(pr0, dtype=np.float64)
    pr1 = np.ascontiguousarray(pr1, dtype=np.float64)
    nbatch, n = pr0.shape
    depth = n.bit_length() - 1
    if 1 << depth != n:
        raise ValueError(f"block length must be a power of two, got {n}")

    ev0 = [np.empty((nbatch, 1 << d)) for d in range(depth)]
    ev1 = [np.empty((nbatch, 1 << d)) for d in range(depth)]
    ev0.append(pr0)
    ev1.append(pr1)
    pend = [np.zeros((nbatch, 1 << d), dtype=np.uint8) for d in range(depth)]

    w_hat = np.empty((nbatch, n), dtype=np.uint8)
    trit = np.empty((nbatch, n), dtype=np.uint8)
    post0 = np.empty((nbatch, n)) if collect_evidence else None
    post1 = np.empty((nbatch, n)) if collect_evidence else None

    def combine_f(d):
        a0, a1 = ev0[d + 1][:, 0::2], ev1[d + 1][:, 0::2]
        b0, b1 = ev0[d + 1][:, 1::2], ev1[d + 1][:, 1::2]
        o0 = 0.5 * (a0 * b0 + a1 * b1)
        o1 = 0.5 * (a0 * b1 + a1 * b0)
        ev0[d][:], ev1[d][:] = _normalize(o0, o1, floor)

    def combine_g(d):
        a0, a1 = ev0[d + 1][:, 0::2], ev1[d + 1][:, 0::2]
        b0, b1 = ev0[d + 1][:, 1::2], ev1[d + 1][:, 1::2]
        u = pend[d] == 1
        au0 = np.where(u, a1, a0)
        au1 = np.where(u, a0, a1)
        o0 = 0.5 * au0 * b0
        o1 = 0.5 * au1 * b1
        ev0[d][:], ev1[d][:] = _normalize(o0, o1, floor)

    for l in range(n):
        if l == 0:
            for d in range(depth - 1, -1, -1):
                combine_f(d)
        else:
            tau = ((l & -l).bit_length()) - 1
            combine_g(tau)
            for d in range(tau - 1, -1, -1):
                combine_f(d)

        e0, e1 = ev0[0][:, 0], ev1[0][:, 0]
        if collect_evidence:
            post0[:, l] = e0
            post1[:, l] = e1
        t = np.where(e0 > e1, 0, np.where(e0 < e1, 1, 2)).astype(np.uint8)
        trit[:, l] = t
        if pinned_mask[l]:
            w = pinned_bits[:, l].astype(np.uint8)
        else:
            w = (t == 1).astype(np.uint8)
        w_hat[:, l] = w

        # propagate the decided bit down the pending-bit cascade
        inb = w[:, None]
        d, lam = 0, l
        while True:
            if d == depth:
                break
            if lam & 1 == 0:
                pend[d][:] = inb
                break
            nxt = np.empty((nbatch, 1 << (d + 1)), dtype=np.uint8)
            nxt[:, 0::2] = pend[d] ^ inb
            nxt[:, 1::2] = inb
            inb = nxt
            d += 1
            lam >>= 1

    if collect_evidence:
        return w_hat, trit, post0, post1
    return w_hat, trit


def rank_packed(words: np.ndarray, ncols: int) -> int:
    """GF(2) rank of rows packed little-endian into uint64 words."""
    rows = []
    w = np.ascontiguousarray(words, dtype=np.uint64)
    for r in range(w.shape[0]):
        rows.append(int.from_bytes(w[r].tobytes(), "little"))
    pivots = {}
    rank = 0
    for v in rows:
        while v:
            b = v.bit_length() - 1
            if b in pivots:
                v ^= pivots[b]
            else:
                pivots[b] = v
                rank += 1
                break
    return rank
