"""Benchmark the compiled kernels against the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--trials 4000]

Covers the two hot paths: the batched successive-cancellation pass (the
inner loop of every frame-error and construction sweep) and the packed
GF(2) rank (the inner loop of the erasure-equivocation estimate).
"""

import argparse
import time

import numpy as np

from polarwire.channels import bec, sample_transmit
from polarwire.construction import bec_z_profile, select_wiretap_sets
from polarwire.gf2 import polar_generator, parity_check_of
from polarwire.kernels import pack_bit_rows, reference
from polarwire.polar import channel_evidence_arrays, polar_encode

try:
    from polarwire.kernels import _accel
except ImportError:
    _accel = None


def bench_decode(backend, n, trials, chunk=512):
    chan = bec(0.3)
    rng = np.random.default_rng(1)
    mask = np.zeros(n, dtype=np.uint8)
    elapsed = 0.0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        w = rng.integers(0, 2, size=(b, n), dtype=np.uint8)
        y = sample_transmit(chan, polar_encode(w), rng)
        pr0, pr1 = channel_evidence_arrays(chan, y)
        pins = np.zeros((b, n), dtype=np.uint8)
        t0 = time.perf_counter()
        backend.sc_decode_batch(pr0, pr1, mask, pins)
        elapsed += time.perf_counter() - t0
        done += b
    return elapsed


def bench_rank(backend, n, trials):
    legit = bec_z_profile(0.0, n)
    eve = bec_z_profile(0.4, n)
    spec = select_wiretap_sets(legit, eve, r=0.9, r_star=0.55)
    h = parity_check_of(polar_generator(n).take_rows(spec.n_set)).entries
    rng = np.random.default_rng(2)
    elapsed = 0.0
    for _ in range(trials):
        erased = np.flatnonzero(rng.random(n) < 0.4)
        packed = pack_bit_rows(h[:, erased])
        t0 = time.perf_counter()
        backend.rank_packed(packed, erased.size)
        elapsed += time.perf_counter() - t0
    return elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=4000)
    args = ap.parse_args()

    backends = [("python", reference)]
    if _accel is not None:
        backends.append(("compiled", _accel))
    else:
        print("compiled backend not built; showing fallback only")

    rows = []
    for n in (1024, 4096):
        times = {name: bench_decode(mod, n, args.trials) for name, mod in backends}
        rows.append((f"sc_decode n={n} x{args.trials}", times))
    times = {name: bench_rank(mod, 1024, max(200, args.trials // 10))
             for name, mod in backends}
    rows.append((f"rank n=1024 x{max(200, args.trials // 10)}", times))

    width = max(len(r[0]) for r in rows) + 2
    header = f"{'workload':<{width}}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, times in rows:
        line = f"{label:<{width}}"
        for name, _ in backends:
            line += f"{times[name]:>11.3f}s"
        if len(backends) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
