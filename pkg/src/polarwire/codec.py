"""The wiretap coset encoder and the successive-cancellation decoders.

Encoding places the secret message on A, fresh uniform bits on N and the
fixed vector b on B, then applies the polar transform; the randomization
bits are what deny the eavesdropper.  Decoding runs the belief-pair
recursion through the kernel backend; the informed variant additionally
pins the message bits and is the measurement device behind the Fano-based
equivocation certificate.

Decoding with a channel model other than the true one is permitted (the
degradation analysis does exactly that); callers flag such runs in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .channels import DiscreteChannel
from .construction import WiretapCodeSpec
from .gf2 import BitVector
from .polar import channel_evidence_arrays, polar_encode


@dataclass(frozen=True)
class WiretapCodeword:
    """A transmitted codeword with the provenance needed for analysis."""

    x: np.ndarray
    u: np.ndarray
    b_star: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class DecodeResult:
    u_hat: np.ndarray
    b_star_hat: np.ndarray
    w_hat: np.ndarray
    # debug-only per-index decision evidence (pr0, pr1), None unless requested
    posteriors: Optional[tuple] = None


def _as_bits(v, length: int, name: str) -> np.ndarray:
    arr = v.bits if isinstance(v, BitVector) else np.asarray(v, dtype=np.uint8)
    if arr.ndim != 1 or arr.size != length:
        raise ValueError(f"{name} must be a bit vector of length {length}")
    return arr.astype(np.uint8)


def wiretap_encode(spec: WiretapCodeSpec, u, rng: np.random.Generator = None,
                   b_star=None) -> WiretapCodeword:
    """Encode a secret message; b_star is drawn uniformly unless forced."""
    u = _as_bits(u, spec.k_secret, "message")
    if b_star is None:
        if rng is None:
            raise ValueError("either a random stream or an explicit b_star is required")
        b_star = rng.integers(0, 2, size=spec.k_random, dtype=np.uint8)
    else:
        b_star = _as_bits(b_star, spec.k_random, "randomization vector")
    w = spec.assemble(u, b_star)
    return WiretapCodeword(x=polar_encode(w), u=u, b_star=b_star,
                           b=spec.b_bits.copy())


def wiretap_encode_batch(spec: WiretapCodeSpec, u: np.ndarray,
                         b_star: np.ndarray) -> np.ndarray:
    """Vectorized encoding of a batch of (message, randomization) rows."""
    return polar_encode(spec.assemble(u, b_star))


def sc_decode_batch(spec: WiretapCodeSpec, channel: DiscreteChannel,
                    y: np.ndarray, export_posteriors: bool = False) -> DecodeResult:
    """Successive-cancellation decoding of received batches (B, n).

    Indices in B are set from the known frozen vector; everything else is
    decided by the evidence comparison with ties resolved to 0.  The decoder
    returns hard decisions; export_posteriors additionally attaches the
    per-index decision evidence for debugging.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.int64))
    if y.shape[1] != spec.n:
        raise ValueError(f"received vector length {y.shape[1]} != n = {spec.n}")
    pr0, pr1 = channel_evidence_arrays(channel, y)
    mask, vals = spec.pinned_for_decode()
    pinned = np.broadcast_to(vals, y.shape).copy()
    if export_posteriors:
        w_hat, _, post0, post1 = kernels.sc_decode_batch(
            pr0, pr1, mask, pinned, collect_evidence=True)
        posteriors = (post0, post1)
    else:
        w_hat, _ = kernels.sc_decode_batch(pr0, pr1, mask, pinned)
        posteriors = None
    return DecodeResult(u_hat=w_hat[:, spec.a_set],
                        b_star_hat=w_hat[:, spec.n_set],
                        w_hat=w_hat, posteriors=posteriors)


def sc_decode(spec: WiretapCodeSpec, channel: DiscreteChannel, y,
              export_posteriors: bool = False) -> DecodeResult:
    """Single-codeword convenience wrapper around sc_decode_batch."""
    res = sc_decode_batch(spec, channel, np.asarray(y)[None, :],
                          export_posteriors=export_posteriors)
    posteriors = None
    if res.posteriors is not None:
        posteriors = (res.posteriors[0][0], res.posteriors[1][0])
    return DecodeResult(u_hat=res.u_hat[0], b_star_hat=res.b_star_hat[0],
                        w_hat=res.w_hat[0], posteriors=posteriors)


def informed_sc_decode_batch(spec: WiretapCodeSpec, channel: DiscreteChannel,
                             y: np.ndarray, known_u: np.ndarray) -> np.ndarray:
    """Genie-aided pass: A and B are pinned, only N-indices are decided.

    Returns the decoded randomization bits (B, |N|).  This is the decoder
    whose error rate feeds the Fano equivocation bound.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.int64))
    known_u = np.atleast_2d(np.asarray(known_u, dtype=np.uint8))
    if known_u.shape != (y.shape[0], spec.k_secret):
        raise ValueError("known messages must be one row per received vector")
    pr0, pr1 = channel_evidence_arrays(channel, y)
    mask = np.zeros(spec.n, dtype=np.uint8)
    mask[spec.b_set] = 1
    mask[spec.a_set] = 1
    pinned = np.zeros(y.shape, dtype=np.uint8)
    pinned[:, spec.b_set] = spec.b_bits
    pinned[:, spec.a_set] = known_u
    w_hat, _ = kernels.sc_decode_batch(pr0, pr1, mask, pinned)
    return w_hat[:, spec.n_set]


def informed_sc_decode(spec: WiretapCodeSpec, channel: DiscreteChannel, y,
                       known_u) -> np.ndarray:
    known_u = _as_bits(known_u, spec.k_secret, "known message")
    out = informed_sc_decode_batch(spec, channel, np.asarray(y)[None, :],
                                   known_u[None, :])
    return out[0]
