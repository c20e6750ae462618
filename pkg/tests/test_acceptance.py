"""Acceptance gate: one test per verifiable end-to-end claim, each printing
a PASS/FAIL line.  Tolerances are fixed here, not tuned at runtime.

Known red: the polarization-fraction window in criterion 3 does not match
the true recursion values at the stated parameters (the exact fraction at
n = 2^20 with threshold 1e-9 is 0.447367..., confirmed in exact rational
arithmetic at reduced size); the test states the required window honestly
and fails.
"""

import itertools
import math
import time

import numpy as np

from polarwire.channels import (bec, bsc, capacity, compose_degraded,
                                erasure_kernel, flip_kernel)
from polarwire.construction import (WiretapCodeSpec, bec_z_evolution,
                                    bec_z_profile, select_wiretap_sets)
from polarwire.experiments import (config_from_tree, run_fer_experiment,
                                   run_secrecy_experiment)
from polarwire.polar import (exact_combined_prob, exact_split_table,
                             matrix_form_prob)
from polarwire.rng import substream
from polarwire.secrecy import (CLASS_S_DOUBLE_PRIME, CLASS_S_PRIME,
                               CLASS_UNPOLARIZED, ErasurePattern,
                               bec_equivocation_mc, bit_mutual_info,
                               conjecture_scan, equivocation_parity_check,
                               exact_equivocation,
                               exact_equivocation_given_pattern,
                               fano_equivocation_bound, mutual_info_profile,
                               rank_of_erased)


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    assert ok, f"{criterion}: {detail}"


def _digits(idx: int, n: int, base: int):
    out = []
    for _ in range(n):
        out.append(idx % base)
        idx //= base
    return out[::-1]


def test_criterion_01_recursion_matches_matrix_form():
    t0 = time.monotonic()
    worst = 0.0
    for channel in (bec(0.5), bsc(0.3)):
        for n in (2, 4):
            for w in itertools.product((0, 1), repeat=n):
                for y in itertools.product(range(channel.num_outputs), repeat=n):
                    rec = exact_combined_prob(channel, w, y)
                    worst = max(worst, abs(rec - matrix_form_prob(channel, w, y)))
    # the joint one-input two-output law of a degraded pair goes through the
    # same recursion unchanged
    pair = compose_degraded(bec(0.5), erasure_kernel(bec(0.5).labels, 0.2))
    joint = pair.joint_channel()
    for n in (2, 4):
        rng = np.random.default_rng(n)
        for _ in range(60):
            w = tuple(rng.integers(0, 2, n).tolist())
            y = tuple(rng.integers(0, joint.num_outputs, n).tolist())
            worst = max(worst, abs(exact_combined_prob(joint, w, y)
                                   - matrix_form_prob(joint, w, y)))
    elapsed = time.monotonic() - t0
    _report("01 combined-channel recursion vs matrix form",
            worst <= 1e-12 and elapsed < 10.0,
            f"max abs diff {worst:.3e}, elapsed {elapsed:.2f}s")


def test_criterion_02_bec_z_recursion():
    worst = 0.0
    prev = None
    for z in bec_z_evolution(0.5, 2 ** 16):
        if prev is not None:
            worst = max(worst, float(np.abs(z[0::2] + z[1::2] - 2 * prev).max()))
        prev = z
    prof4 = bec_z_profile(0.5, 4)
    values_ok = prof4.z.tolist() == [0.9375, 0.5625, 0.4375, 0.0625]
    table_dev = max(abs(exact_split_table(bec(0.5), 4, l).bhattacharyya() - prof4.z[l])
                    for l in range(4))
    ok = worst <= 1e-12 and values_ok and table_dev <= 1e-9
    _report("02 erasure reliability recursion",
            ok, f"conservation dev {worst:.2e}, n=4 values {prof4.z.tolist()}, "
                f"split-table dev {table_dev:.2e}")


def test_criterion_03_polarization_at_scale():
    t0 = time.monotonic()
    prof = bec_z_profile(0.5, 2 ** 20)
    lo = float((prof.z < 1e-9).mean())
    hi = float((prof.z > 1 - 1e-9).mean())
    elapsed = time.monotonic() - t0
    ok = (0.45 <= lo <= 0.50) and (0.45 <= hi <= 0.50) and (lo + hi >= 0.93) \
        and elapsed < 5.0
    _report("03 polarization fractions at n=2^20",
            ok, f"frac<1e-9 = {lo:.6f}, frac>1-1e-9 = {hi:.6f}, sum = {lo + hi:.6f}, "
                f"required each in [0.45, 0.50] and sum >= 0.93, elapsed {elapsed:.2f}s")


def test_criterion_04_reliability_decay():
    t0 = time.monotonic()
    trials = 10_000
    cfg = config_from_tree({
        "kind": "fer", "seed": 0, "trials": trials, "n": [256, 1024, 4096],
        "r": 0.5, "legit": {"kind": "bec", "delta": 0.3},
    })
    report = run_fer_experiment(cfg)
    fers = {p["n"]: p["fer"] for p in report.points}
    sigmas = {n: math.sqrt(max(f * (1 - f), 1e-12) / trials) for n, f in fers.items()}
    monotone = all(
        fers[b] <= fers[a] + 3 * math.sqrt(sigmas[a] ** 2 + sigmas[b] ** 2)
        for a, b in ((256, 1024), (1024, 4096)))
    decay = fers[4096] < fers[256] / 5
    union_ok = True
    for p in report.points:
        prof = bec_z_profile(0.3, p["n"])
        k = p["set_sizes"]["a"] + p["set_sizes"]["nset"]
        z_sum = float(np.sort(prof.z)[:k].sum())
        union_ok &= p["fer"] <= z_sum + 3 * sigmas[p["n"]]
    elapsed = time.monotonic() - t0
    ok = monotone and decay and union_ok and elapsed < 120.0
    _report("04 frame-error decay and union bound",
            ok, f"fer = {[fers[n] for n in (256, 1024, 4096)]}, "
                f"monotone {monotone}, decay {decay}, union {union_ok}, "
                f"elapsed {elapsed:.1f}s")


def test_criterion_05_split_channel_degradation():
    pair = compose_degraded(bec(0.2), erasure_kernel(bec(0.2).labels, 0.25))
    joint = pair.joint_channel()
    base = pair.legit
    d = pair.kernel.matrix
    my, mz = base.num_outputs, pair.eve.num_outputs
    worst = 0.0
    for n in (2, 4):
        for l in range(n):
            joint_split = exact_split_table(joint, n, l)
            base_split = exact_split_table(base, n, l)
            n_yz = (my * mz) ** n
            digs = np.array([_digits(i, n, my * mz) for i in range(n_yz)])
            y_dig = digs // mz
            z_dig = digs % mz
            y_idx = np.zeros(n_yz, dtype=np.int64)
            d_prod = np.ones(n_yz)
            for k in range(n):
                y_idx = y_idx * my + y_dig[:, k]
                d_prod *= d[y_dig[:, k], z_dig[:, k]]
            expect = base_split.probs[:, :, y_idx] * d_prod[None, None, :]
            worst = max(worst, float(np.abs(joint_split.probs - expect).max()))
    _report("05 degradation of split channels",
            worst <= 1e-12, f"max abs diff {worst:.3e} over n in (2, 4)")


def test_criterion_06_rank_equivocation_identity():
    worst = 0.0
    for n, n_set in ((2, [1]), (4, [2, 3]), (8, [4, 5, 6, 7])):
        a_set = sorted(set(range(n)) - set(n_set))
        spec = WiretapCodeSpec(n=n, a_set=a_set, n_set=n_set, b_set=[], b_bits=[])
        h = equivocation_parity_check(spec)
        for mask in range(2 ** n):
            unerased = frozenset(i for i in range(n) if (mask >> i) & 1)
            pattern = ErasurePattern(n=n, unerased=unerased)
            hp = exact_equivocation_given_pattern(spec, pattern)
            rk = rank_of_erased(spec, pattern, h)
            worst = max(worst, abs(hp - rk))
    spec2 = WiretapCodeSpec(n=2, a_set=[0], n_set=[1], b_set=[], b_bits=[])
    h_exact = exact_equivocation(spec2, bec(0.5))
    ok = worst <= 1e-9 and abs(h_exact - 0.75) <= 1e-12
    _report("06 per-pattern rank identity",
            ok, f"max |H - rank| = {worst:.2e}, H(U|Z) at n=2 = {h_exact!r}")


def _desk_scale_secrecy_report():
    cfg = config_from_tree({
        "kind": "secrecy", "seed": 0, "trials": 1000, "n": [1024],
        "legit": {"kind": "bec", "delta": 0.0},
        "eve": {"kind": "bec", "delta": 0.4},
        "eps": 0.01,
    })
    return cfg, run_secrecy_experiment(cfg)


def test_criterion_07_desk_scale_secrecy():
    t0 = time.monotonic()
    _, report = _desk_scale_secrecy_report()
    elapsed = time.monotonic() - t0
    p = report.points[0]
    rate_ok = p["rate"] >= 0.38
    equiv_ok = p["equiv_rate"] >= 0.9 * p["rate"]
    # the mean rank also tracks its n*delta ceiling closely
    ratio = p["equiv_bits"] / (1024 * 0.4)
    ok = rate_ok and equiv_ok and ratio >= 0.93 and elapsed < 60.0
    _report("07 secrecy at desk scale",
            ok, f"|A|/n = {p['rate']:.6f} (>= 0.38), equivocation rate = "
                f"{p['equiv_rate']:.6f} (>= {0.9 * p['rate']:.6f}), "
                f"mean-rank / (n delta) = {ratio:.4f} (>= 0.93), elapsed {elapsed:.1f}s")


def test_criterion_08_fano_bound_consistency():
    checks = []
    # desk-scale rank run: recompute the rank spread for the slack term
    cfg, report = _desk_scale_secrecy_report()
    p = report.points[0]
    spec = select_wiretap_sets(bec_z_profile(0.0, 1024), bec_z_profile(0.4, 1024),
                               r=0.99, r_star=0.59)
    est = bec_equivocation_mc(spec, 0.4, 256, substream(cfg.seed, 2, 0, 0))
    sigma_equiv = est.std_error() / 1024
    sigma_pe = math.sqrt(max(p["fer_informed"] * (1 - p["fer_informed"]), 1e-12)
                         / p["trials"])
    slack = 3 * (sigma_equiv + p["r_star"] * sigma_pe)
    checks.append(("rank-mode n=1024",
                   p["equiv_rate"] + slack >= p["fano_bound"],
                   p["equiv_rate"], p["fano_bound"]))
    # exact small-n run over a degraded pair
    cfg2 = config_from_tree({
        "kind": "secrecy", "seed": 5, "trials": 2000, "n": [8], "mode": "exact",
        "legit": {"kind": "bsc", "p": 0.05},
        "kernel": {"kind": "flip", "p": 0.05},
        "r": 0.375, "r_star": 0.125, "construction_trials": 5000,
    })
    rep2 = run_secrecy_experiment(cfg2)
    q = rep2.points[0]
    sigma_pe2 = math.sqrt(max(q["fer_informed"] * (1 - q["fer_informed"]), 1e-12)
                          / q["trials"])
    checks.append(("exact-mode n=8",
                   q["equiv_rate"] + 3 * q["r_star"] * sigma_pe2 >= q["fano_bound"],
                   q["equiv_rate"], q["fano_bound"]))
    # a run where the randomization rate sits well below the eavesdropper
    # capacity, so the certificate is non-vacuous
    cfg3 = config_from_tree({
        "kind": "secrecy", "seed": 6, "trials": 1000, "n": [1024],
        "legit": {"kind": "bec", "delta": 0.0},
        "eve": {"kind": "bec", "delta": 0.5},
        "r_star": 0.25, "eps": 0.01,
    })
    rep3 = run_secrecy_experiment(cfg3)
    w = rep3.points[0]
    spec3 = select_wiretap_sets(bec_z_profile(0.0, 1024), bec_z_profile(0.5, 1024),
                                r=0.99, r_star=0.25)
    est3 = bec_equivocation_mc(spec3, 0.5, 256, substream(cfg3.seed, 2, 0, 0))
    slack3 = 3 * (est3.std_error() / 1024
                  + w["r_star"] * math.sqrt(max(w["fer_informed"]
                                                * (1 - w["fer_informed"]), 1e-12)
                                            / w["trials"]))
    checks.append(("rank-mode n=1024 non-vacuous",
                   w["fano_bound"] > 0.4
                   and w["equiv_rate"] + slack3 >= w["fano_bound"],
                   w["equiv_rate"], w["fano_bound"]))
    ok = all(c[1] for c in checks)
    _report("08 Fano bound consistency",
            ok, "; ".join(f"{name}: equiv {er:.4f} vs bound {fb:.4f}"
                          for name, _, er, fb in checks))


def test_criterion_09_conditioned_mutual_information_suite():
    chan = bec(0.5)
    cap = capacity(chan)
    chain_dev = 0.0
    j_violation = 0.0
    eq_dev = 0.0
    for n in (2, 4, 8):
        profile = mutual_info_profile(chan, n)
        chain_dev = max(chain_dev, abs(sum(profile.values) - n * cap))
        for d_mask in range(1, 2 ** n):
            d_set = [j for j in range(n) if (d_mask >> j) & 1]
            for i in d_set:
                j_val = bit_mutual_info(chan, n, i, cond_set=d_set)
                j_violation = max(j_violation, profile.values[i] - j_val)
        for i in range(n):
            eq_dev = max(eq_dev, abs(bit_mutual_info(chan, n, i, cond_set=range(n))
                                     - profile.values[i]))
    # degenerate ordering: everything outside D precedes D, classification
    # must match the plain single-index polarization
    n, delta = 8, 0.3
    profile = mutual_info_profile(chan, n)
    good = [i for i in range(n) if profile.values[i] > 1 - delta]
    d_set = list(range(3, 8))
    scan = conjecture_scan(chan, n, delta,
                           [i for i in d_set if i in good],
                           [i for i in d_set if i not in good])
    degenerate_ok = True
    for e in scan.entries:
        if e.index in scan.s_set:
            plain = (CLASS_S_PRIME if e.i_value < delta else
                     CLASS_S_DOUBLE_PRIME if e.i_value > 1 - delta else
                     CLASS_UNPOLARIZED)
            degenerate_ok &= e.klass == plain and abs(e.j_value - e.i_value) <= 1e-12
    ok = chain_dev <= 1e-9 and j_violation <= 1e-12 and eq_dev <= 1e-12 \
        and degenerate_ok
    _report("09 conditioned mutual-information suite",
            ok, f"chain dev {chain_dev:.2e}, worst I-J excess {j_violation:.2e}, "
                f"full-set J vs I dev {eq_dev:.2e}, degenerate scan {degenerate_ok}")


def test_criterion_10_fixed_randomization_leaks():
    spec = WiretapCodeSpec(n=2, a_set=[0], n_set=[1], b_set=[], b_bits=[])
    h_random = exact_equivocation(spec, bec(0.5))
    h_fixed = exact_equivocation(spec, bec(0.5), fixed_b_star=[0])
    margin = h_random - h_fixed
    ok = margin > 0 and abs(h_random - 0.75) <= 1e-12 and abs(h_fixed - 0.5) <= 1e-12
    _report("10 fixed randomization bits leak",
            ok, f"H(U|Z) = {h_random!r}, H(U|Z, b* fixed) = {h_fixed!r}, "
                f"margin {margin!r}")


def test_criterion_11_reproducibility(tmp_path, monkeypatch):
    from polarwire.cli import main
    monkeypatch.setenv("POLARWIRE_OUT", str(tmp_path))
    cfg = tmp_path / "rep.cfg"
    cfg.write_text("""
kind = secrecy
seed = 21
trials = 2200
n = 128, 256
legit.kind = bec
legit.delta = 0.0
eve.kind = bec
eve.delta = 0.4
""")
    assert main(["secrecy", "--config", str(cfg), "--out", "r1", "--workers", "1"]) == 0
    assert main(["secrecy", "--config", str(cfg), "--out", "r2", "--workers", "1"]) == 0
    assert main(["secrecy", "--config", str(cfg), "--out", "r4", "--workers", "4"]) == 0
    b1 = (tmp_path / "r1.csv").read_bytes()
    same_rerun = b1 == (tmp_path / "r2.csv").read_bytes()
    same_workers = b1 == (tmp_path / "r4.csv").read_bytes()
    _report("11 byte-identical reruns",
            same_rerun and same_workers,
            f"rerun identical {same_rerun}, worker-count invariant {same_workers}")
