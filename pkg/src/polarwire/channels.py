"""Binary-input discrete memoryless channel models for the wiretap setting.

Channels are immutable transition tables over an explicitly enumerated,
finite output alphabet.  Degraded wiretap pairs are built by composing a
base channel with a stochastic degradation kernel, so the kernel is always
available for split-channel degradation checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

_ROW_SUM_TOL = 1e-12

ERASURE = "e"


class DiscreteChannel:
    """A binary-input DMC given by prob[x][y] over an enumerated alphabet."""

    __slots__ = ("_transition", "_labels")

    def __init__(self, transition, labels=None):
        t = np.asarray(transition, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != 2:
            raise ValueError(f"transition table must have shape (2, M), got {t.shape}")
        if t.shape[1] < 1:
            raise ValueError("output alphabet must not be empty")
        if (t < 0).any():
            raise ValueError("transition probabilities must be non-negative")
        sums = t.sum(axis=1)
        if np.abs(sums - 1.0).max() > _ROW_SUM_TOL:
            raise ValueError(f"transition rows must sum to 1 within {_ROW_SUM_TOL}, got {sums}")
        if labels is None:
            labels = tuple(f"y{k}" for k in range(t.shape[1]))
        labels = tuple(str(s) for s in labels)
        if len(labels) != t.shape[1]:
            raise ValueError("one label per output symbol required")
        if len(set(labels)) != len(labels):
            raise ValueError("output labels must be distinct")
        t.setflags(write=False)
        self._transition = t
        self._labels = labels

    @property
    def transition(self) -> np.ndarray:
        return self._transition

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def num_outputs(self) -> int:
        return self._transition.shape[1]

    def prob(self, x: int, y: int) -> float:
        return float(self._transition[x, y])

    def label_index(self, label: str) -> int:
        return self._labels.index(label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteChannel):
            return NotImplemented
        return self._labels == other._labels and np.array_equal(
            self._transition, other._transition)

    def __repr__(self) -> str:
        return f"DiscreteChannel(outputs={self._labels})"


class DegradationKernel:
    """Stochastic map D(z|y) linking a base channel output to a degraded one."""

    __slots__ = ("_matrix", "_in_labels", "_out_labels")

    def __init__(self, matrix, in_labels, out_labels):
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ValueError("kernel must be a 2-D stochastic matrix")
        if (m < 0).any() or np.abs(m.sum(axis=1) - 1.0).max() > _ROW_SUM_TOL:
            raise ValueError(f"kernel rows must be stochastic within {_ROW_SUM_TOL}")
        if m.shape[0] != len(in_labels) or m.shape[1] != len(out_labels):
            raise ValueError("kernel dimensions must match its label sets")
        m.setflags(write=False)
        self._matrix = m
        self._in_labels = tuple(in_labels)
        self._out_labels = tuple(out_labels)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def in_labels(self) -> tuple:
        return self._in_labels

    @property
    def out_labels(self) -> tuple:
        return self._out_labels


@dataclass(frozen=True)
class DegradedPair:
    """Wiretap pair (legitimate, eavesdropper) tied together by its kernel."""

    legit: DiscreteChannel
    eve: DiscreteChannel
    kernel: DegradationKernel

    def joint_channel(self) -> DiscreteChannel:
        """The one-input two-output law P(y,z|x) = G(y|x) D(z|y) flattened
        over the product alphabet, ordered y-major."""
        g = self.legit.transition
        d = self.kernel.matrix
        joint = g[:, :, None] * d[None, :, :]
        labels = tuple(f"{y}|{z}" for y in self.legit.labels for z in self.eve.labels)
        return DiscreteChannel(joint.reshape(2, -1), labels)

    def joint_index(self, y: int, z: int) -> int:
        return y * self.eve.num_outputs + z


def bec(delta: float) -> DiscreteChannel:
    """Binary erasure channel with outputs (0, e, 1)."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {delta}")
    table = [[1.0 - delta, delta, 0.0],
             [0.0, delta, 1.0 - delta]]
    return DiscreteChannel(table, ("0", ERASURE, "1"))


def bsc(p: float) -> DiscreteChannel:
    """Binary symmetric channel with crossover probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover probability must be in [0, 1], got {p}")
    return DiscreteChannel([[1.0 - p, p], [p, 1.0 - p]], ("0", "1"))


def from_table(rows, labels=None) -> DiscreteChannel:
    """Channel from an explicit table; asymmetric tables are rejected."""
    c = DiscreteChannel(rows, labels)
    if symmetry_check(c) is None:
        raise ValueError(
            "table channel is not output-symmetric: no involutive output "
            "permutation pi with p(y|0) = p(pi(y)|1) exists")
    return c


def make_channel(kind: str, **params) -> DiscreteChannel:
    """Dispatching constructor used by config loading: bec / bsc / table."""
    kind = kind.lower()
    if kind == "bec":
        return bec(params["delta"])
    if kind == "bsc":
        return bsc(params["p"])
    if kind == "table":
        return from_table(params["rows"], params.get("labels"))
    raise ValueError(f"unknown channel kind {kind!r}")


def symmetry_check(c: DiscreteChannel, tol: float = 1e-9) -> Optional[tuple]:
    """Search for an involutive output permutation pi with p(y|0) = p(pi(y)|1).

    Exhaustive backtracking over probability-matched pairings; alphabets are
    small, so this is cheap.  Returns pi as a tuple, or None if the channel
    is asymmetric.
    """
    p0, p1 = c.transition
    m = c.num_outputs

    def feasible(y: int, z: int) -> bool:
        # pi(y) = z and pi(z) = y must both satisfy the definition
        return abs(p0[y] - p1[z]) <= tol and abs(p0[z] - p1[y]) <= tol

    pi = [-1] * m

    def assign(y: int) -> bool:
        if y == m:
            return True
        if pi[y] >= 0:
            return assign(y + 1)
        for z in range(y, m):
            if pi[z] >= 0 or not feasible(y, z):
                continue
            pi[y], pi[z] = z, y
            if assign(y + 1):
                return True
            pi[y] = -1
            if z != y:
                pi[z] = -1
        return False

    if assign(0):
        return tuple(pi)
    return None


def capacity(c: DiscreteChannel) -> float:
    """I(X;Y) in bits at equiprobable input; requires a symmetric channel."""
    if symmetry_check(c) is None:
        raise ValueError("capacity at uniform input requires a symmetric channel")
    t = c.transition
    py = 0.5 * t.sum(axis=0)
    acc = 0.0
    for x in range(2):
        mask = t[x] > 0.0
        acc += 0.5 * np.sum(t[x, mask] * (np.log2(t[x, mask]) - np.log2(py[mask])))
    return float(acc)


def compose_degraded(base: DiscreteChannel, kernel: DegradationKernel) -> DegradedPair:
    """Degrade a base channel through a kernel, keeping the pair and kernel."""
    if kernel.in_labels != base.labels:
        raise ValueError(
            f"kernel input alphabet {kernel.in_labels} does not match the "
            f"base channel outputs {base.labels}")
    eve = DiscreteChannel(base.transition @ kernel.matrix, kernel.out_labels)
    return DegradedPair(legit=base, eve=eve, kernel=kernel)


def erasure_kernel(in_labels, q: float) -> DegradationKernel:
    """Erase each surviving symbol with probability q; erasures stay erased."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {q}")
    in_labels = tuple(in_labels)
    if ERASURE in in_labels:
        out_labels = in_labels
    else:
        out_labels = in_labels[:1] + (ERASURE,) + in_labels[1:]
    m = np.zeros((len(in_labels), len(out_labels)))
    e = out_labels.index(ERASURE)
    for i, lab in enumerate(in_labels):
        j = out_labels.index(lab)
        if lab == ERASURE:
            m[i, e] = 1.0
        else:
            m[i, j] = 1.0 - q
            m[i, e] += q
    return DegradationKernel(m, in_labels, out_labels)


def flip_kernel(in_labels, p: float) -> DegradationKernel:
    """BSC-style kernel over a binary alphabet: flip with probability p."""
    in_labels = tuple(in_labels)
    if len(in_labels) != 2:
        raise ValueError("flip kernel requires a binary alphabet")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must be in [0, 1], got {p}")
    return DegradationKernel([[1.0 - p, p], [p, 1.0 - p]], in_labels, in_labels)


def identity_kernel(in_labels) -> DegradationKernel:
    in_labels = tuple(in_labels)
    return DegradationKernel(np.eye(len(in_labels)), in_labels, in_labels)


def sample_transmit(c: DiscreteChannel, x, rng: np.random.Generator) -> np.ndarray:
    """Memoryless per-symbol sampling of channel outputs for codeword bits x.

    x may be a single codeword or a batch with trailing axis n; the result
    has the same shape and holds output-symbol indices.  One uniform draw is
    consumed per symbol, so the consumption pattern is fixed by x.shape.
    """
    xb = np.asarray(x, dtype=np.uint8)
    u = rng.random(xb.shape)
    cdf = np.cumsum(c.transition, axis=1)
    out = np.empty(xb.shape, dtype=np.int64)
    for bit in (0, 1):
        mask = xb == bit
        out[mask] = np.searchsorted(cdf[bit], u[mask], side="right")
    # guard against u == 1.0 landing one past the last symbol
    np.clip(out, 0, c.num_outputs - 1, out=out)
    return out
