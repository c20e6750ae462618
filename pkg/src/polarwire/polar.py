"""Polar transform and exact small-blocklength channel oracles.

The encoder is the O(n log n) butterfly of the recursive construction: pair
XOR, reverse shuffle, then two half-length transforms.  The oracles build
the full combined-channel law and the split-channel tables by exhaustive
summation, so they are restricted to desk-scale blocklengths (n <= 10) and
serve as ground truth for the fast decoding kernels.

Numeric policy for decoding: per-bit evidence lives in (pr0, pr1) pairs so
the split-channel recursion stays literal; the decoding kernels renormalize
each pair after every combine and treat a pair whose mass falls below a
floor (default 1e-300) as no evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import math

import numpy as np

from .gf2 import BitVector, _require_power_of_two, mat_vec_mul, polar_generator

_ORACLE_MAX_N = 10
_JOINT_TABLE_CACHE: dict = {}


@dataclass(frozen=True)
class BeliefPair:
    """Unnormalized channel evidence (pr0, pr1) for one input bit."""

    pr0: float
    pr1: float

    def __post_init__(self):
        if not (math.isfinite(self.pr0) and math.isfinite(self.pr1)):
            raise ValueError("belief pair must be finite")
        if self.pr0 < 0 or self.pr1 < 0:
            raise ValueError("belief pair must be non-negative")

    def normalized(self) -> "BeliefPair":
        s = self.pr0 + self.pr1
        if s <= 0.0:
            return BeliefPair(0.5, 0.5)
        return BeliefPair(self.pr0 / s, self.pr1 / s)

    def decide(self) -> int:
        """Hard decision with ties resolved to 0."""
        return 0 if self.pr0 >= self.pr1 else 1


def belief_combine_f(a: BeliefPair, b: BeliefPair, floor: float = 0.0) -> BeliefPair:
    """Odd-index combine: out(v) = 1/2 sum_u a(v xor u) b(u)."""
    o0 = 0.5 * (a.pr0 * b.pr0 + a.pr1 * b.pr1)
    o1 = 0.5 * (a.pr0 * b.pr1 + a.pr1 * b.pr0)
    return BeliefPair(max(o0, floor), max(o1, floor))


def belief_combine_g(a: BeliefPair, b: BeliefPair, u: int, floor: float = 0.0) -> BeliefPair:
    """Even-index combine with the odd bit known: out(v) = 1/2 a(u xor v) b(v)."""
    if u not in (0, 1):
        raise ValueError("known bit must be 0 or 1")
    au0 = a.pr1 if u else a.pr0
    au1 = a.pr0 if u else a.pr1
    return BeliefPair(max(0.5 * au0 * b.pr0, floor), max(0.5 * au1 * b.pr1, floor))


def polar_encode(w):
    """Encode w into w . G_n via the butterfly; accepts batches (..., n).

    BitVector input returns a BitVector; array input returns a uint8 array.
    """
    if isinstance(w, BitVector):
        return BitVector(_butterfly(w.bits[None, :])[0])
    arr = np.asarray(w, dtype=np.uint8)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[None, :]
    out = _butterfly(arr)
    return out[0] if squeeze else out


def _butterfly(w: np.ndarray) -> np.ndarray:
    """Vectorized recursive transform over the trailing axis."""
    n = w.shape[-1]
    _require_power_of_two(n)
    if n == 1:
        return w.copy()
    s = np.empty_like(w)
    s[..., 0::2] = w[..., 0::2] ^ w[..., 1::2]
    s[..., 1::2] = w[..., 1::2]
    v_first, v_second = s[..., 0::2], s[..., 1::2]
    return np.concatenate([_butterfly(v_first), _butterfly(v_second)], axis=-1)


def combined_channel_table(channel, n: int) -> np.ndarray:
    """Exact joint law table[w, y] = p_n(y | w) for all inputs and outputs.

    Rows are indexed by the integer with w_1 as the most significant bit;
    columns by the base-M integer with y_1 as the most significant digit.
    Computed through the generator-matrix form p(y | w G_n); cached per
    (channel, n) because the secrecy oracles reuse it heavily.
    """
    _require_power_of_two(n)
    if n > _ORACLE_MAX_N:
        raise ValueError(f"exhaustive oracle limited to n <= {_ORACLE_MAX_N}, got {n}")
    key = (channel.transition.tobytes(), channel.labels, n)
    cached = _JOINT_TABLE_CACHE.get(key)
    if cached is not None:
        return cached
    m = channel.num_outputs
    w_all = ((np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.uint8)
    x_all = polar_encode(w_all)
    t = channel.transition
    table = np.ones((2 ** n, 1))
    for k in range(n):
        # append position k: columns split into m digits, y_k most significant first
        table = (table[:, :, None] * t[x_all[:, k], None, :]).reshape(2 ** n, -1)
    table.setflags(write=False)
    _JOINT_TABLE_CACHE[key] = table
    return table


def exact_combined_prob(channel, w: Sequence[int], y: Sequence[int]) -> float:
    """p_n(y | w) by the channel-combining recursion, cross-checked against
    the generator-matrix form; the two must agree within 1e-12.
    """
    w = np.asarray(list(w), dtype=np.uint8)
    y = np.asarray(list(y), dtype=np.int64)
    n = w.size
    _require_power_of_two(n)
    if n > _ORACLE_MAX_N:
        raise ValueError(f"exhaustive oracle limited to n <= {_ORACLE_MAX_N}, got {n}")
    if y.size != n:
        raise ValueError("input and output vectors must share the block length")
    rec = _combined_recursion(channel, w, y)
    x = polar_encode(w)
    direct = float(np.prod(channel.transition[x, y]))
    if abs(rec - direct) > 1e-12:
        raise ArithmeticError(
            f"recursion/matrix mismatch: {rec!r} vs {direct!r} at n={n}")
    return rec


def _combined_recursion(channel, w: np.ndarray, y: np.ndarray) -> float:
    n = w.size
    if n == 1:
        return float(channel.transition[w[0], y[0]])
    s = np.empty_like(w)
    s[0::2] = w[0::2] ^ w[1::2]
    s[1::2] = w[1::2]
    v = np.concatenate([s[0::2], s[1::2]])
    h = n // 2
    return (_combined_recursion(channel, v[:h], y[:h])
            * _combined_recursion(channel, v[h:], y[h:]))


@dataclass(frozen=True)
class ExactSplitTable:
    """Exhaustive split-channel law p_n^{(l)}(y, w-prefix | x).

    probs has shape (2, 2^l, M^n): input bit, prefix integer (w_1 most
    significant), output-vector integer.  The split index l is 0-based.
    """

    n: int
    l: int
    probs: np.ndarray

    def __post_init__(self):
        sums = self.probs.sum(axis=(1, 2))
        if np.abs(sums - 1.0).max() > 1e-9:
            raise ValueError(f"split table rows must sum to 1 within 1e-9, got {sums}")

    def bhattacharyya(self) -> float:
        """sum over (y, prefix) of sqrt(p(.|0) p(.|1))."""
        return float(np.sqrt(self.probs[0] * self.probs[1]).sum())

    def mutual_info(self) -> float:
        """I(X; Y, W-prefix) in bits at equiprobable input."""
        joint = 0.5 * self.probs
        marg = np.broadcast_to(joint.sum(axis=0), joint.shape)
        mask = joint > 0.0
        # p(x) = 1/2, so the information term is log2(joint / (0.5 * marg))
        return float(np.sum(joint[mask] * np.log2(joint[mask] / (0.5 * marg[mask]))))

    def evidence(self, y_index: int, prefix: int) -> BeliefPair:
        return BeliefPair(float(self.probs[0, prefix, y_index]),
                          float(self.probs[1, prefix, y_index]))


def exact_split_table(channel, n: int, l: int) -> ExactSplitTable:
    """Split channel l (0-based) of the size-n combined channel, by
    exhaustive summation over the trailing input bits."""
    _require_power_of_two(n)
    if n > _ORACLE_MAX_N:
        raise ValueError(f"exhaustive oracle limited to n <= {_ORACLE_MAX_N}, got {n}")
    if not 0 <= l < n:
        raise ValueError(f"split index must be in [0, {n}), got {l}")
    joint = combined_channel_table(channel, n)
    ny = joint.shape[1]
    # rows grouped as (prefix, x, complement); prefix bits are most significant
    grouped = joint.reshape(2 ** l, 2, 2 ** (n - l - 1), ny)
    summed = grouped.sum(axis=2) / 2 ** (n - 1)
    probs = np.moveaxis(summed, 1, 0)  # (x, prefix, y)
    return ExactSplitTable(n=n, l=l, probs=np.ascontiguousarray(probs))


def split_channel_evidence(beliefs: Sequence[BeliefPair], l: int,
                           prefix: Sequence[int]) -> BeliefPair:
    """Reference evidence for input bit l given per-position channel beliefs
    and the first l input bits, by the odd/even split recursion.

    This is the scalar ground truth the batched decoding kernels are tested
    against; it is exponential-free but per-call, so only test-scale.
    """
    n = len(beliefs)
    _require_power_of_two(n)
    if not 0 <= l < n:
        raise ValueError(f"split index must be in [0, {n}), got {l}")
    if len(prefix) != l:
        raise ValueError("prefix must hold exactly the first l bits")
    if n == 1:
        return beliefs[0]
    pairs = l // 2
    gpfx = [prefix[2 * j] ^ prefix[2 * j + 1] for j in range(pairs)]
    epfx = [prefix[2 * j + 1] for j in range(pairs)]
    h = n // 2
    a = split_channel_evidence(beliefs[:h], pairs, gpfx)
    b = split_channel_evidence(beliefs[h:], pairs, epfx)
    if l % 2 == 0:
        return belief_combine_f(a, b)
    return belief_combine_g(a, b, prefix[l - 1])


def channel_evidence_arrays(channel, y) -> tuple:
    """Per-position evidence pairs for received symbol indices y, normalized
    per symbol; shape matches y.  Symbols impossible under both inputs give
    the uninformative pair (only reachable under model mismatch)."""
    y = np.asarray(y, dtype=np.int64)
    t = channel.transition
    pr0 = t[0][y]
    pr1 = t[1][y]
    s = pr0 + pr1
    bad = s <= 0.0
    if bad.any():
        pr0 = np.where(bad, 0.5, pr0)
        pr1 = np.where(bad, 0.5, pr1)
        s = np.where(bad, 1.0, s)
    return pr0 / s, pr1 / s


def matrix_form_prob(channel, w, y) -> float:
    """p(y | w G_n): the linear-encoding route, for cross-checks."""
    wv = w if isinstance(w, BitVector) else BitVector(w)
    x = mat_vec_mul(wv, polar_generator(len(wv)))
    t = channel.transition
    return float(np.prod([t[x[k], y[k]] for k in range(len(wv))]))
