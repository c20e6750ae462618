"""Code construction: reliability profiles, wiretap set selection, and
rate-equivocation allocation.

For erasure channels the per-index reliability is the exact Bhattacharyya
parameter from the one-step recursion Z' = 2Z - Z^2, Z'' = Z^2.  For other
symmetric channels there is no closed form, so the profile is a Monte Carlo
decision-error proxy measured by a genie-aided successive-cancellation pass;
profiles are labeled with their method and the two are never mixed silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import kernels
from .channels import DiscreteChannel, sample_transmit, symmetry_check
from .gf2 import _require_power_of_two
from .polar import channel_evidence_arrays

_MC_CHUNK = 2048
_MIN_TRUSTED_TRIALS = 1000


class ConstructionInfeasible(ValueError):
    """Requested rates exceed what the reliability profiles support."""


class RegionViolation(ValueError):
    """A rate-equivocation pair lies outside the achievable region."""


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-split-channel reliability values for one blocklength.

    z holds the exact Bhattacharyya parameter (method "bec-exact") or a
    Monte Carlo decision-error proxy (method "monte-carlo"); both order the
    indices from worst (large) to best (small).
    """

    n: int
    z: np.ndarray
    method: str
    trials: Optional[int] = None
    low_trials: bool = False

    def __post_init__(self):
        _require_power_of_two(self.n)
        z = np.asarray(self.z, dtype=np.float64)
        if z.shape != (self.n,):
            raise ValueError(f"profile must hold one value per index, got {z.shape}")
        if (z < 0).any() or (z > 1).any():
            raise ValueError("reliability values must lie in [0, 1]")
        if self.method not in ("bec-exact", "monte-carlo"):
            raise ValueError(f"unknown profile method {self.method!r}")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    def capacity_proxy(self) -> float:
        """Achievable-rate proxy: 1 - mean(z) for exact BEC profiles (an
        identity, by conservation of the recursion), 1 - 2*mean(z) for the
        Monte Carlo error proxy (errors polarize to 0 or 1/2)."""
        mean = float(self.z.mean())
        if self.method == "bec-exact":
            return 1.0 - mean
        return max(0.0, 1.0 - 2.0 * mean)


def bec_z_evolution(delta: float, n: int) -> Iterator[np.ndarray]:
    """Yield every level of the erasure Z-recursion, ending at length n."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {delta}")
    _require_power_of_two(n)
    z = np.array([delta], dtype=np.float64)
    yield z
    while z.size < n:
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
        yield z


def bec_z_profile(delta: float, n: int) -> ReliabilityProfile:
    """Exact Bhattacharyya parameters of all n split channels of a BEC."""
    for z in bec_z_evolution(delta, n):
        pass
    return ReliabilityProfile(n=n, z=z, method="bec-exact")


def mc_z_estimate(channel: DiscreteChannel, n: int, trials: int,
                  rng: np.random.Generator) -> ReliabilityProfile:
    """Monte Carlo per-index decision-error proxy under genie-aided SC.

    The all-zero codeword is transmitted `trials` times; at every index the
    genie pass records how the split-channel evidence compares against the
    true bit.  A tie is counted as half an error: the hard rule resolves
    ties to 0, which never errs on the all-zero word, while over random
    inputs a tied decision errs half the time.

    Below 1000 trials the profile is flagged low_trials.
    """
    _require_power_of_two(n)
    if symmetry_check(channel) is None:
        raise ValueError("Monte Carlo construction requires a symmetric channel")
    if trials < 1:
        raise ValueError("at least one trial required")
    zeros_mask = np.ones(n, dtype=np.uint8)
    err = np.zeros(n, dtype=np.float64)
    done = 0
    while done < trials:
        chunk = min(_MC_CHUNK, trials - done)
        x = np.zeros((chunk, n), dtype=np.uint8)
        y = sample_transmit(channel, x, rng)
        pr0, pr1 = channel_evidence_arrays(channel, y)
        _, trit = kernels.sc_decode_batch(pr0, pr1, zeros_mask, x)
        err += (trit == 1).sum(axis=0) + 0.5 * (trit == 2).sum(axis=0)
        done += chunk
    z = err / trials
    return ReliabilityProfile(n=n, z=np.clip(z, 0.0, 1.0), method="monte-carlo",
                              trials=trials, low_trials=trials < _MIN_TRUSTED_TRIALS)


@dataclass(frozen=True, eq=False)
class WiretapCodeSpec:
    """Blocklength, the index partition (A, N, B) and the frozen vector.

    a_set carries the secret-message bits, n_set the uniformly random bits,
    b_set the fixed bits b.  All index arrays are sorted and 0-based; the
    serialized form is 1-based.
    """

    n: int
    a_set: np.ndarray
    n_set: np.ndarray
    b_set: np.ndarray
    b_bits: np.ndarray
    beta: float = 0.45

    def __eq__(self, other) -> bool:
        if not isinstance(other, WiretapCodeSpec):
            return NotImplemented
        return (self.n == other.n and self.beta == other.beta
                and np.array_equal(self.a_set, other.a_set)
                and np.array_equal(self.n_set, other.n_set)
                and np.array_equal(self.b_set, other.b_set)
                and np.array_equal(self.b_bits, other.b_bits))

    def __post_init__(self):
        _require_power_of_two(self.n)
        a = np.asarray(sorted(int(i) for i in np.asarray(self.a_set).ravel()), dtype=np.int64)
        nn = np.asarray(sorted(int(i) for i in np.asarray(self.n_set).ravel()), dtype=np.int64)
        b = np.asarray(sorted(int(i) for i in np.asarray(self.b_set).ravel()), dtype=np.int64)
        bb = np.asarray(self.b_bits, dtype=np.uint8).ravel()
        sets = np.concatenate([a, nn, b])
        if sets.size != self.n or np.unique(sets).size != self.n or (
                sets.size and (sets.min() < 0 or sets.max() >= self.n)):
            raise ValueError("a_set, n_set and b_set must partition the index range")
        if bb.size != b.size:
            raise ValueError(f"frozen vector must have length |B| = {b.size}")
        if bb.size and not np.isin(bb, (0, 1)).all():
            raise ValueError("frozen bits must be 0 or 1")
        if not 0.0 < self.beta < 0.5:
            raise ValueError(f"beta must lie in (0, 0.5), got {self.beta}")
        for name, arr in (("a_set", a), ("n_set", nn), ("b_set", b), ("b_bits", bb)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def k_secret(self) -> int:
        return int(self.a_set.size)

    @property
    def k_random(self) -> int:
        return int(self.n_set.size)

    @property
    def secret_rate(self) -> float:
        return self.a_set.size / self.n

    def pinned_for_decode(self) -> tuple:
        """(mask, values) pinning only the frozen set B."""
        mask = np.zeros(self.n, dtype=np.uint8)
        vals = np.zeros(self.n, dtype=np.uint8)
        mask[self.b_set] = 1
        vals[self.b_set] = self.b_bits
        return mask, vals

    def assemble(self, u: np.ndarray, b_star: np.ndarray) -> np.ndarray:
        """Place message, random and frozen bits into the input vector w."""
        u = np.asarray(u, dtype=np.uint8)
        b_star = np.asarray(b_star, dtype=np.uint8)
        if u.shape[-1] != self.k_secret or b_star.shape[-1] != self.k_random:
            raise ValueError("message or randomization length mismatch")
        shape = np.broadcast_shapes(u.shape[:-1], b_star.shape[:-1])
        w = np.zeros(shape + (self.n,), dtype=np.uint8)
        w[..., self.a_set] = u
        w[..., self.n_set] = b_star
        w[..., self.b_set] = self.b_bits
        return w


def select_wiretap_sets(legit: ReliabilityProfile, eve: ReliabilityProfile,
                        r: float, r_star: float, beta: float = 0.45,
                        b_bits: Optional[np.ndarray] = None) -> WiretapCodeSpec:
    """Choose (A, N, B) from the two reliability profiles.

    N takes the floor(n*r_star) indices where the eavesdropper's split
    channels are most reliable; A takes the floor(n*r) - floor(n*r_star)
    most reliable remaining indices of the legitimate profile; B is the
    rest, frozen to b_bits (all-zero by default).  Ties break toward the
    lower index.

    A noiseless legitimate channel (all-zero profile) leaves nothing worth
    freezing: every index outside N carries message bits and B is empty.
    """
    if legit.n != eve.n:
        raise ValueError("profiles must share the blocklength")
    n = legit.n
    if not 0.0 <= r_star <= r:
        raise ValueError(f"need 0 <= r_star <= r, got r_star={r_star}, r={r}")
    cap_eve = eve.capacity_proxy()
    if r_star > cap_eve + 1e-9:
        raise ConstructionInfeasible(
            f"r_star={r_star:.6f} exceeds the eavesdropper capacity proxy "
            f"{cap_eve:.6f} (deficit {r_star - cap_eve:.6f})")
    cap_legit = legit.capacity_proxy()
    if r > cap_legit + 1e-9:
        raise ConstructionInfeasible(
            f"r={r:.6f} exceeds the legitimate capacity proxy "
            f"{cap_legit:.6f} (deficit {r - cap_legit:.6f})")

    k_rand = int(np.floor(n * r_star))
    order_eve = np.lexsort((np.arange(n), eve.z))
    n_set = np.sort(order_eve[:k_rand])

    noiseless = not legit.z.any()
    remaining = np.setdiff1d(np.arange(n), n_set, assume_unique=True)
    if noiseless:
        a_set = remaining
        b_set = np.empty(0, dtype=np.int64)
    else:
        k_secret = int(np.floor(n * r)) - k_rand
        if k_secret < 0:
            raise ConstructionInfeasible(
                f"floor(n*r) < floor(n*r_star): no room for message bits "
                f"(deficit {k_rand - int(np.floor(n * r))})")
        rem_order = remaining[np.lexsort((remaining, legit.z[remaining]))]
        a_set = np.sort(rem_order[:k_secret])
        b_set = np.sort(rem_order[k_secret:])
    if b_bits is None:
        b_bits = np.zeros(b_set.size, dtype=np.uint8)
    return WiretapCodeSpec(n=n, a_set=a_set, n_set=n_set, b_set=b_set,
                           b_bits=b_bits, beta=beta)


@dataclass(frozen=True)
class RateAllocation:
    secret_fraction: float
    nonsecret_fraction: float
    random_fraction: float


def allocate_rate_equivocation(rate: float, re: float, legit_cap: float,
                               eve_cap: float) -> RateAllocation:
    """Split a rate-equivocation pair into secret / non-secret / random rates.

    The pair must lie in the achievable region: 0 <= re <= rate <= legit_cap
    and re <= legit_cap - eve_cap.  The secret part rides on A-indices; the
    non-secret surplus fills spare A-indices first and then displaces random
    bits on N-indices, which is what makes full-capacity operation possible.
    """
    cs = legit_cap - eve_cap
    if cs < 0:
        raise RegionViolation("legitimate capacity below eavesdropper capacity")
    if not 0.0 <= re <= rate:
        raise RegionViolation(f"need 0 <= Re <= R, got Re={re}, R={rate}")
    if rate > legit_cap + 1e-12:
        raise RegionViolation(f"R={rate} exceeds the legitimate capacity {legit_cap}")
    if re > cs + 1e-12:
        raise RegionViolation(f"Re={re} exceeds the secrecy capacity {cs}")
    nonsecret = rate - re
    spare_a = cs - re
    overlap = max(0.0, nonsecret - spare_a)
    return RateAllocation(secret_fraction=re,
                          nonsecret_fraction=nonsecret,
                          random_fraction=eve_cap - overlap)


def profile_to_text(profile: ReliabilityProfile) -> str:
    lines = [f"n: {profile.n}", f"method: {profile.method}"]
    if profile.trials is not None:
        lines.append(f"trials: {profile.trials}")
    lines.append("z:")
    lines.extend(repr(float(v)) for v in profile.z)
    return "\n".join(lines) + "\n"


def profile_from_text(text: str) -> ReliabilityProfile:
    header = {}
    z_vals = []
    in_z = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_z:
            z_vals.append(float(line))
        elif line == "z:":
            in_z = True
        else:
            key, _, val = line.partition(":")
            header[key.strip()] = val.strip()
    trials = int(header["trials"]) if "trials" in header else None
    return ReliabilityProfile(n=int(header["n"]), z=np.array(z_vals),
                              method=header["method"], trials=trials,
                              low_trials=bool(trials is not None and trials < _MIN_TRUSTED_TRIALS))


def _set_to_text(indices: np.ndarray) -> str:
    return ",".join(str(int(i) + 1) for i in indices)


def _set_from_text(text: str) -> np.ndarray:
    text = text.strip()
    if not text:
        return np.empty(0, dtype=np.int64)
    return np.array([int(t) - 1 for t in text.split(",")], dtype=np.int64)


def spec_to_text(spec: WiretapCodeSpec) -> str:
    """Serialize a code spec; index sets are written 1-based and sorted."""
    return "\n".join([
        f"n: {spec.n}",
        f"beta: {spec.beta!r}",
        f"a: {_set_to_text(spec.a_set)}",
        f"nset: {_set_to_text(spec.n_set)}",
        f"b: {_set_to_text(spec.b_set)}",
        f"b_bits: {''.join(str(int(b)) for b in spec.b_bits)}",
    ]) + "\n"


def spec_from_text(text: str) -> WiretapCodeSpec:
    fields = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition(":")
        fields[key.strip()] = val.strip()
    b_bits = np.array([int(c) for c in fields.get("b_bits", "")], dtype=np.uint8)
    return WiretapCodeSpec(n=int(fields["n"]),
                           a_set=_set_from_text(fields.get("a", "")),
                           n_set=_set_from_text(fields.get("nset", "")),
                           b_set=_set_from_text(fields.get("b", "")),
                           b_bits=b_bits,
                           beta=float(fields.get("beta", 0.45)))
