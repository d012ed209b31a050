"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np

from cvhide import bounds, channels, discrimination as disc, phase_space
from cvhide.fock_core import StateSpec, TruncatedOperator, make_state, mean_photon_number, trace_norm

THERMAL_GRID = [(nu, nu + d) for nu in (0.0, 0.5, 1.0, 2.0) for d in (0.5, 1.0, 3.0)]


def random_state(dim, rank, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(v)
    w = rng.random(rank)
    return TruncatedOperator.from_matrix((q * (w / w.sum())) @ q.conj().T, hermitian=True)


def test_criterion_01_locc_constants(record):
    d1 = abs(bounds.c_m(1) - 2 / (27 * math.pi))
    worst = max(bounds.c_m(m) for m in range(4, 11))
    ok = d1 <= 1e-12 and worst < 1e-6
    record(1, ok, f"|c_1 - 2/(27 pi)| = {d1:.2e}, max c_m (m=4..10) = {worst:.3e}")
    assert ok


def test_criterion_02_energy_for_hiding(record):
    E = bounds.plan_energy_for_hiding(1e-3, 1, 1.0)
    ok = 5.35 <= E <= 5.45
    record(2, ok, f"plan_energy_for_hiding(1e-3, 1, 1) = {E:.6f}")
    assert ok


def test_criterion_03_thermal_closed_forms(record):
    t0 = time.perf_counter()
    worst = 0.0
    for nu, mu in THERMAL_GRID:
        cf = disc.thermal_closed_forms(nu, mu)
        s = disc.SchemeSpec.from_specs(StateSpec.thermal(nu), StateSpec.thermal(mu))
        deltas = (disc.beta_1(s) - cf.half_trace, disc.wigner_l1_bound(s) - cf.half_wigner_l1,
                  disc.beta_het(s) - cf.half_het, disc.beta_hom(s) - cf.half_hom)
        worst = max(worst, max(abs(d) for d in deltas))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 60
    record(3, ok, f"max delta over 12 pairs x 4 paths = {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_04_sandwich_chain(record):
    rng = np.random.default_rng(20240)
    pairs = THERMAL_GRID + [(nu, nu + float(rng.uniform(0.01, 10)))
                            for nu in rng.uniform(0, 5, 50)]
    worst = -math.inf
    for nu, mu in pairs:
        cf = disc.thermal_closed_forms(nu, mu)
        worst = max(worst, cf.half_het - cf.half_trace, cf.half_trace - math.e * cf.half_het)
    s = disc.SchemeSpec.from_specs(StateSpec.thermal(1.0), StateSpec.thermal(4.0))
    b1, het = disc.beta_1(s), disc.beta_het(s)
    worst = max(worst, het - b1, b1 - math.e * het)
    ok = worst <= 1e-9
    record(4, ok, f"max violation of het <= trace <= e*het over {len(pairs)} pairs = {worst:.3e}")
    assert ok


def test_criterion_05_even_odd(record):
    d_trace = d_wig = 0.0
    for lam in (0.0, 0.3, 0.6, 0.9):
        s = disc.even_odd_scheme(lam)
        d_trace = max(d_trace, abs(disc.beta_1(s) - 1))
        d_wig = max(d_wig, abs(disc.wigner_l1_bound(s) - disc.even_odd_gocc_bound(lam)))
    d_lim = abs(disc.even_odd_gocc_bound(0.0) - 2 / math.e)
    ok = d_trace <= 1e-10 and d_wig <= 1e-4 and d_lim <= 1e-12
    record(5, ok, f"trace delta {d_trace:.2e}, Wigner-L1 delta {d_wig:.2e}, "
                  f"lambda=0 limit delta {d_lim:.2e}")
    assert ok


def test_criterion_06_fock_homodyne(record):
    t0 = time.perf_counter()
    d0 = abs(disc.fock_pair_hom_distance(0) - math.sqrt(8 / math.pi) * math.exp(-0.5))
    limit = 8 / math.pi**2
    vals = {n: disc.fock_pair_hom_distance(n) for n in range(10, 101, 10)}
    elapsed = time.perf_counter() - t0
    floor_ok = all(v >= limit - 0.05 for v in vals.values())
    d100 = abs(vals[100] - limit)
    ok = d0 <= 1e-6 and floor_ok and d100 <= 0.03 and elapsed < 120
    record(6, ok, f"n=0 delta {d0:.2e}, min(n=10..100) = {min(vals.values()):.4f}, "
                  f"|n=100 - 8/pi^2| = {d100:.4f}, {elapsed:.1f} s")
    assert ok


def test_criterion_07_coherent_pair(record):
    worst = 0.0
    for a in (0.25, 0.5, 1.0):
        s = disc.SchemeSpec.from_specs(StateSpec.coherent(a), StateSpec.coherent(-a))
        cf = disc.coherent_pair_biases(a)
        worst = max(worst, abs(disc.beta_1(s) - math.sqrt(1 - math.exp(-4 * a * a))),
                    abs(disc.beta_hom(s) - math.erf(math.sqrt(2) * a)),
                    abs(cf["beta_1"] - math.sqrt(1 - math.exp(-4 * a * a))))
    ok = worst <= 1e-6
    record(7, ok, f"max delta of beta_1 and beta_hom = {worst:.2e}")
    assert ok


def test_criterion_08_channel_oracles(record):
    d_or = 0.0
    for i, lam in enumerate((0.05, 0.2, 1.0)):
        rho = random_state(40, 3, 100 + i)
        fast = channels.noise_channel_apply(rho, lam, out_dim=40).entries
        slow = channels.noise_channel_oracle(rho, lam, out_dim=40).entries
        d_or = max(d_or, float(np.max(np.abs(fast - slow))))
    rho = random_state(40, 3, 200)
    two = channels.noise_channel_apply(channels.noise_channel_apply(rho, 0.2), 0.3)
    one = channels.noise_channel_apply(rho, 0.5)
    d = min(two.dim, one.dim)
    d_sg = float(np.max(np.abs(two.entries[:d, :d] - one.entries[:d, :d])))
    eta = 0.6
    out = channels.pure_loss_apply(rho, eta)
    xs = np.array([-0.6, 0.0, 0.6])
    alphas = (xs[:, None] + 1j * xs[None, :]).ravel()
    lhs = phase_space.characteristic_fn(out, alphas)
    rhs = (phase_space.characteristic_fn(rho, math.sqrt(eta) * alphas)
           * np.exp(-0.5 * (1 - eta) * np.abs(alphas) ** 2))
    d_chi = float(np.max(np.abs(lhs - rhs)))
    ok = d_or < 1e-6 and d_sg < 1e-6 and d_chi < 1e-6
    record(8, ok, f"oracle {d_or:.2e}, semigroup {d_sg:.2e}, loss characteristic {d_chi:.2e}")
    assert ok


def test_criterion_09_teleport_soundness(record):
    specs = ([StateSpec.fock(n) for n in range(6)]
             + [StateSpec.thermal(v) for v in (0.5, 1.0, 2.0)]
             + [StateSpec.coherent(a) for a in (0.5, 1.0)])
    worst_num = worst_ref = -math.inf
    for spec in specs:
        rho = make_state(spec)
        E = mean_photon_number(rho)
        for lam in (0.01, 0.1, 0.5):
            out = channels.noise_channel_apply(rho, lam)
            num = trace_norm(out - rho.padded(out.dim))
            ref = bounds.bk_error_bound_refined(E, 1, lam)
            lin = bounds.bk_error_bound_linear(E, 1, lam)
            worst_num = max(worst_num, num - ref)
            worst_ref = max(worst_ref, ref - lin)
    lams = np.geomspace(1e-10, 2.0, 25)
    Es = (0.0, 1.0, 5.0)
    mono = all(np.all(np.diff([f(E, m, x) for x in lams]) >= -1e-12)
               for f in (bounds.bk_error_bound_refined, bounds.bk_error_bound_linear)
               for E in Es for m in (1, 2))
    mono &= all(np.all(np.diff([bounds.bk_error_bound_refined(E, 2, x) for E in Es]) >= -1e-12)
                for x in lams)
    vanish = max(bounds.bk_error_bound_refined(5.0, 2, 1e-16),
                 bounds.bk_error_bound_linear(5.0, 2, 1e-16))
    ok = worst_num <= 1e-10 and worst_ref <= 1e-12 and mono and vanish < 1e-6
    record(9, ok, f"max(numeric - refined) = {worst_num:.3e}, max(refined - linear) = "
                  f"{worst_ref:.3e}, monotone={mono}, bound at lam=1e-16: {vanish:.1e}")
    assert ok


def test_criterion_10_squeezed_lower_bound(record):
    rows = {r: bounds.squeezed_noise_lower_bound(r, 0.1) for r in (0.0, 0.5, 1.0, 1.5)}
    sound = all(v["numeric"] >= v["analytic"] - 1e-6 for v in rows.values())
    analytic = [v["analytic"] for v in rows.values()]
    trend = (all(a < b for a, b in zip(analytic, analytic[1:]))
             and abs(bounds.squeezed_analytic_bound(8.0, 0.1) - 2) < 1e-2)
    exceeds = rows[1.5]["analytic"] > 1.3
    ok = sound and trend and exceeds
    record(10, ok, f"numeric >= analytic: {sound}; analytic(r=1.5) = {rows[1.5]['analytic']:.4f} "
                   f"(> 1.3: {exceeds}; numeric {rows[1.5]['numeric']:.4f}); trend to 2: {trend}")
    assert sound and trend
    assert exceeds, "analytic lower bound at r=1.5, lam=0.1 does not exceed 1.3"


def test_criterion_11_efficiency(record):
    worst = -math.inf
    ones = 0.0
    for lam in (0.5, 0.9, 0.99):
        sch = disc.even_odd_scheme(lam)
        z = sch.rho - sch.sigma
        for eta in (0.5, 0.8, 0.95):
            num = 0.5 * trace_norm(channels.pure_loss_apply(z, eta))
            worst = max(worst, num - disc.efficiency_bound(lam, eta))
        ones = max(ones, abs(0.5 * trace_norm(channels.pure_loss_apply(z, 1.0)) - 1))
    ok = worst <= 1e-6 and ones <= 1e-10
    record(11, ok, f"max(numeric - bound) = {worst:.3e}, |eta=1 bias - 1| = {ones:.2e}")
    assert ok


def test_criterion_12_oscillatory(record):
    deltas = [abs(disc.oscillatory_integral_check(0.3, 2.0, n)["delta"])
              for n in (50, 100, 200, 400)]
    dec = all(a > b for a, b in zip(deltas, deltas[1:]))
    ok = dec and deltas[-1] < 0.02
    record(12, ok, "deltas " + ", ".join(f"{d:.2e}" for d in deltas))
    assert ok


def _cli(*args):
    return subprocess.Popen([sys.executable, "-m", "cvhide", *args],
                            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)


def test_criterion_13_determinism(record, tmp_path):
    files = [tmp_path / f"verify{i}.txt" for i in range(2)]
    procs = [_cli("verify", "--out", str(f)) for f in files]
    sweeps = [tmp_path / f"sweep{i}.csv" for i in range(3)]
    base = ["even-odd", "--lambda", "0:0.9:0.1", "--numeric", "--format", "csv"]
    procs += [_cli(*base, "--out", str(sweeps[0]), "--jobs", "1"),
              _cli(*base, "--out", str(sweeps[1]), "--jobs", "1"),
              _cli(*base, "--out", str(sweeps[2]), "--jobs", "4")]
    for p in procs:
        p.wait(timeout=600)
    same_verify = files[0].read_bytes() == files[1].read_bytes()
    same_sweep = sweeps[0].read_bytes() == sweeps[1].read_bytes() == sweeps[2].read_bytes()
    ok = same_verify and same_sweep and files[0].stat().st_size > 0
    record(13, ok, f"verify runs identical: {same_verify}; sweep serial/serial/parallel "
                   f"identical: {same_sweep}")
    assert ok
