"""Secrecy measurement: exact equivocation oracles, the rank-based erasure
equivocation, the Fano-style lower bound, and the conditioned per-index
mutual-information scan.

Entropies are in bits throughout.

The erasure mechanism: with a noiseless legitimate channel and an empty
frozen set the codeword is uniform over all binary words, and conditioned
on an erasure pattern the message entropy equals the GF(2) rank of the
parity-check columns at the *erased* positions (those are the unknowns of
the eavesdropper's linear system).  Averaged over patterns this estimates
H(U|Z) without enumerating outputs, which is what makes blocklengths in the
thousands measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .channels import DiscreteChannel
from .construction import WiretapCodeSpec
from .gf2 import Gf2Matrix, parity_check_of, polar_generator, rank_of_columns
from .polar import combined_channel_table, polar_encode

_Z_CHUNK = 4096


@dataclass(frozen=True)
class ErasurePattern:
    """A BEC realization, recorded as the set of unerased indices."""

    n: int
    unerased: frozenset

    def __post_init__(self):
        if not all(0 <= i < self.n for i in self.unerased):
            raise ValueError("pattern indices must lie in [0, n)")
        object.__setattr__(self, "unerased", frozenset(int(i) for i in self.unerased))

    @property
    def erased(self) -> frozenset:
        return frozenset(range(self.n)) - self.unerased

    @classmethod
    def from_erased_mask(cls, mask: np.ndarray) -> "ErasurePattern":
        mask = np.asarray(mask, dtype=bool)
        return cls(n=mask.size, unerased=frozenset(np.flatnonzero(~mask).tolist()))


def binary_entropy(p: float) -> float:
    """h2(p) in bits, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    acc = 0.0
    if p > 0.0:
        acc -= p * math.log2(p)
    if p < 1.0:
        acc -= (1.0 - p) * math.log2(1.0 - p)
    return acc


@dataclass(frozen=True)
class EquivocationEstimate:
    mean_bits: float
    ranks: np.ndarray
    trials: int

    def std_error(self) -> float:
        if self.trials < 2:
            return 0.0
        return float(self.ranks.std(ddof=1) / math.sqrt(self.trials))


def equivocation_parity_check(spec: WiretapCodeSpec) -> Gf2Matrix:
    """Parity check of the code generated by G_n(N); |A| x n when B is empty."""
    g_n = polar_generator(spec.n)
    return parity_check_of(g_n.take_rows(spec.n_set))


def bec_equivocation_mc(spec: WiretapCodeSpec, delta: float, trials: int,
                        rng: np.random.Generator,
                        h_matrix: Optional[Gf2Matrix] = None) -> EquivocationEstimate:
    """Monte Carlo H(U|Z) for a noiseless-legitimate / BEC-eavesdropper pair.

    Requires B = {} so that every coset is equally likely; the per-trial
    statistic is the rank of the parity-check columns at the erased
    positions, whose mean is H(U|Z) in bits.
    """
    if spec.b_set.size:
        raise ValueError(
            "rank-based equivocation needs an empty frozen set: with fixed "
            "bits the cosets are no longer equally likely and the rank "
            "statistic does not measure H(U|Z)")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {delta}")
    if trials < 1:
        raise ValueError("at least one trial required")
    h = h_matrix if h_matrix is not None else equivocation_parity_check(spec)
    h_bits = h.entries
    ranks = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        erased = rng.random(spec.n) < delta
        cols = np.flatnonzero(erased)
        if cols.size == 0 or h_bits.shape[0] == 0:
            ranks[t] = 0
            continue
        packed = kernels.pack_bit_rows(h_bits[:, cols])
        ranks[t] = kernels.rank_packed(packed, cols.size)
    return EquivocationEstimate(mean_bits=float(ranks.mean()), ranks=ranks,
                                trials=trials)


def _all_inputs(spec: WiretapCodeSpec, fixed_b_star=None) -> tuple:
    """All codewords with uniform (u, b*): X rows plus the u index per row."""
    k_a, k_n = spec.k_secret, spec.k_random
    u_all = ((np.arange(2 ** k_a)[:, None] >> np.arange(k_a - 1, -1, -1)[None, :]) & 1
             ).astype(np.uint8).reshape(2 ** k_a, k_a)
    if fixed_b_star is None:
        b_all = ((np.arange(2 ** k_n)[:, None] >> np.arange(k_n - 1, -1, -1)[None, :]) & 1
                 ).astype(np.uint8).reshape(2 ** k_n, k_n)
    else:
        b_all = np.asarray(fixed_b_star, dtype=np.uint8).reshape(1, k_n)
    u_rep = np.repeat(u_all, b_all.shape[0], axis=0)
    b_rep = np.tile(b_all, (u_all.shape[0], 1))
    x = polar_encode(spec.assemble(u_rep, b_rep))
    u_index = np.repeat(np.arange(2 ** k_a), b_all.shape[0])
    return x, u_index


def exact_equivocation(spec: WiretapCodeSpec, eve: DiscreteChannel,
                       fixed_b_star=None) -> float:
    """H(U|Z) in bits by exhaustive summation over (u, b*, z).

    When fixed_b_star is given the randomization bits are pinned and the
    result is H(U | Z, b* = value) instead; comparing the two measures the
    leakage caused by freezing the randomization.  Output vectors are
    consumed in bounded chunks, so memory stays flat in |Z|^n.
    """
    if spec.n > 10:
        raise ValueError(f"exhaustive oracle limited to n <= 10, got {spec.n}")
    x, u_index = _all_inputs(spec, fixed_b_star)
    rows = x.shape[0]
    k_a = spec.k_secret
    t = eve.transition
    m = eve.num_outputs
    total_z = m ** spec.n
    h_joint = 0.0  # H(U, Z)
    h_z = 0.0
    row_prob = 1.0 / rows
    start = 0
    while start < total_z:
        stop = min(start + _Z_CHUNK, total_z)
        digits = _z_digits(np.arange(start, stop), spec.n, m)
        # likelihood[row, z] = prod_k t[x_k, z_k]
        like = np.ones((rows, stop - start))
        for k in range(spec.n):
            like *= t[x[:, k]][:, digits[:, k]]
        joint_uz = np.zeros((2 ** k_a, stop - start))
        np.add.at(joint_uz, u_index, like * row_prob)
        pz = joint_uz.sum(axis=0)
        mask = joint_uz > 0.0
        h_joint -= float(np.sum(joint_uz[mask] * np.log2(joint_uz[mask])))
        maskz = pz > 0.0
        h_z -= float(np.sum(pz[maskz] * np.log2(pz[maskz])))
        start = stop
    return h_joint - h_z


def _z_digits(z_indices: np.ndarray, n: int, base: int) -> np.ndarray:
    """Base-`base` digit expansion, most significant digit first."""
    out = np.empty((z_indices.size, n), dtype=np.int64)
    rem = z_indices.copy()
    for k in range(n - 1, -1, -1):
        out[:, k] = rem % base
        rem //= base
    return out


def exact_equivocation_given_pattern(spec: WiretapCodeSpec,
                                     pattern: ErasurePattern) -> float:
    """H(U | X at the unerased positions), exactly, for one BEC realization.

    This is the quantity the rank identity speaks about: it equals the rank
    of the parity-check columns at the erased positions.
    """
    if spec.n > 10:
        raise ValueError(f"exhaustive oracle limited to n <= 10, got {spec.n}")
    if pattern.n != spec.n:
        raise ValueError("pattern and spec blocklengths differ")
    x, u_index = _all_inputs(spec)
    seen = sorted(pattern.unerased)
    rows = x.shape[0]
    counts: dict = {}
    for r in range(rows):
        key = x[r, seen].tobytes()
        bucket = counts.setdefault(key, {})
        bucket[u_index[r]] = bucket.get(u_index[r], 0) + 1
    h = 0.0
    for bucket in counts.values():
        total = sum(bucket.values())
        p_key = total / rows
        h_cond = 0.0
        for cnt in bucket.values():
            p = cnt / total
            h_cond -= p * math.log2(p)
        h += p_key * h_cond
    return h


def fano_equivocation_bound(card_a: int, n: int, r_star: float, eps: float,
                            pe_given_u: float) -> float:
    """Certified equivocation-rate lower bound from a measured informed-decoder
    error rate: |A|/n - eps - 1/n - (h2(pe) + n r* pe)/n, clamped at 0."""
    if not 0.0 <= pe_given_u <= 1.0:
        raise ValueError(f"error rate must be in [0, 1], got {pe_given_u}")
    bound = (card_a / n - eps - 1.0 / n
             - (binary_entropy(pe_given_u) + n * r_star * pe_given_u) / n)
    return max(0.0, bound)


@dataclass(frozen=True)
class MutualInfoReport:
    """Per-index mutual information values, in bits."""

    n: int
    kind: str  # "I" or "J"
    indices: tuple
    values: tuple
    cond_set: Optional[tuple] = None  # the set D for J-type reports

    def __post_init__(self):
        if self.kind not in ("I", "J"):
            raise ValueError(f"report kind must be I or J, got {self.kind!r}")
        if len(self.indices) != len(self.values):
            raise ValueError("one value per index required")
        if any(v < -1e-12 or v > 1.0 + 1e-12 for v in self.values):
            raise ValueError("per-bit mutual information must lie in [0, 1]")

    def value_at(self, i: int) -> float:
        return self.values[self.indices.index(i)]


def _mi_from_table(table: np.ndarray, n: int, i: int, cond: Sequence[int]) -> float:
    """I(W_i; W_cond, Y) for uniform i.i.d. inputs, from the joint table."""
    ny = table.shape[1]
    nd = table.reshape((2,) * n + (ny,)) / (2 ** n)
    keep = sorted(set(cond) | {i})
    drop = tuple(ax for ax in range(n) if ax not in keep)
    q = nd.sum(axis=drop) if drop else nd
    pos = keep.index(i)
    q = np.moveaxis(q, pos, 0).reshape(2, -1)
    rest = q.sum(axis=0, keepdims=True)
    mask = q > 0.0
    h_cond = -float(np.sum(q[mask] * np.log2(q[mask] / np.broadcast_to(rest, q.shape)[mask])))
    return 1.0 - h_cond


def bit_mutual_info(channel: DiscreteChannel, n: int, i: int,
                    cond_set: Optional[Iterable[int]] = None) -> float:
    """I_i = I(W_i; W_{<i}, Y), or J_i when a conditioning set D is given.

    For J the conditioning is the earlier indices inside D plus everything
    outside D (at any position); i must belong to D.  Exhaustive, n <= 8.
    """
    if n > 8:
        raise ValueError(f"exhaustive mutual information limited to n <= 8, got {n}")
    if not 0 <= i < n:
        raise ValueError(f"index must be in [0, {n}), got {i}")
    table = combined_channel_table(channel, n)
    if cond_set is None:
        cond = list(range(i))
    else:
        d = sorted(set(int(j) for j in cond_set))
        if i not in d:
            raise ValueError("the scanned index must belong to the conditioning set D")
        cond = [j for j in d if j < i] + [j for j in range(n) if j not in d]
    return _mi_from_table(table, n, i, cond)


def mutual_info_profile(channel: DiscreteChannel, n: int) -> MutualInfoReport:
    """All I_i at blocklength n (exhaustive)."""
    values = tuple(bit_mutual_info(channel, n, i) for i in range(n))
    return MutualInfoReport(n=n, kind="I", indices=tuple(range(n)), values=values)


CLASS_A_PRIME = "A_PRIME"
CLASS_S_PRIME = "S_PRIME"
CLASS_S_DOUBLE_PRIME = "S_DOUBLE_PRIME"
CLASS_UNPOLARIZED = "UNPOLARIZED"


@dataclass(frozen=True)
class ConjectureScanEntry:
    index: int
    i_value: float
    j_value: float
    klass: str


@dataclass(frozen=True)
class ConjectureScanReport:
    n: int
    delta: float
    a_prime: tuple
    s_set: tuple
    entries: tuple
    dichotomy_holds: bool
    cardinality_ok: bool
    capacity_bits: float

    def counts(self) -> dict:
        out = {CLASS_A_PRIME: 0, CLASS_S_PRIME: 0, CLASS_S_DOUBLE_PRIME: 0,
               CLASS_UNPOLARIZED: 0}
        for e in self.entries:
            out[e.klass] += 1
        return out


def conjecture_scan(channel: DiscreteChannel, n: int, delta: float,
                    a_prime: Iterable[int], s_set: Iterable[int],
                    capacity_bits: Optional[float] = None) -> ConjectureScanReport:
    """Classify the indices of S by their conditioned mutual information J.

    a_prime must be good indices (I > 1 - delta) and s_set must avoid them;
    each S index lands in S' (J < delta), S'' (J > 1 - delta) or stays
    UNPOLARIZED, an explicit third class because the dichotomy is an open
    conjecture and violations must be visible, not forced away.  The report
    also audits |S'' + A'| <= n C, whose violation would contradict the
    coding theorem.
    """
    if n > 8:
        raise ValueError(f"exhaustive scan limited to n <= 8, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {delta}")
    a_prime = tuple(sorted(set(int(j) for j in a_prime)))
    s_set = tuple(sorted(set(int(j) for j in s_set)))
    if set(a_prime) & set(s_set):
        raise ValueError("A' and S must be disjoint")
    profile = mutual_info_profile(channel, n)
    good = {j for j in range(n) if profile.values[j] > 1.0 - delta}
    if not set(a_prime) <= good:
        raise ValueError(f"A' must contain only indices with I > {1 - delta}: good set is {sorted(good)}")
    if set(s_set) & good:
        raise ValueError("S must avoid the good index set")
    d_set = a_prime + s_set
    entries = []
    for j in sorted(d_set):
        jv = bit_mutual_info(channel, n, j, cond_set=d_set)
        iv = profile.values[j]
        if j in a_prime:
            klass = CLASS_A_PRIME
        elif jv < delta:
            klass = CLASS_S_PRIME
        elif jv > 1.0 - delta:
            klass = CLASS_S_DOUBLE_PRIME
        else:
            klass = CLASS_UNPOLARIZED
        entries.append(ConjectureScanEntry(index=j, i_value=iv, j_value=jv, klass=klass))
    if capacity_bits is None:
        from .channels import capacity
        capacity_bits = capacity(channel)
    n_dprime = sum(1 for e in entries if e.klass == CLASS_S_DOUBLE_PRIME)
    cardinality_ok = (n_dprime + len(a_prime)) <= n * capacity_bits + 1e-9
    dichotomy = all(e.klass != CLASS_UNPOLARIZED for e in entries if e.index in s_set)
    return ConjectureScanReport(n=n, delta=delta, a_prime=a_prime, s_set=s_set,
                                entries=tuple(entries), dichotomy_holds=dichotomy,
                                cardinality_ok=cardinality_ok,
                                capacity_bits=capacity_bits)


def rank_of_erased(spec: WiretapCodeSpec, pattern: ErasurePattern,
                   h_matrix: Optional[Gf2Matrix] = None) -> int:
    """Rank of the parity-check columns at the erased positions."""
    h = h_matrix if h_matrix is not None else equivocation_parity_check(spec)
    return rank_of_columns(h, sorted(pattern.erased))
