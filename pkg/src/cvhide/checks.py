"""Closed-form versus numeric cross-checks run by ``cvhide verify``.

Each group returns a list of ``CheckResult`` rows. Groups are deterministic:
random inputs come from fixed seeds and nothing depends on timing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, channels, discrimination as disc, phase_space
from .fock_core import (StateSpec, TruncatedOperator, make_state, mean_photon_number,
                        trace_norm)

THERMAL_GRID = [(nu, nu + d) for nu in (0.0, 0.5, 1.0, 2.0) for d in (0.5, 1.0, 3.0)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    anchor: str
    value: float
    expected: float
    delta: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} [{self.anchor}] value={self.value:.12g} "
                f"expected={self.expected:.12g} delta={self.delta:.3g}")


class _Group:
    def __init__(self, group: str, anchor: str):
        self.group, self.anchor, self.rows = group, anchor, []

    def close(self, name, value, expected, tol):
        d = float(value) - float(expected)
        self.rows.append(CheckResult(name, self.group, self.anchor, float(value),
                                     float(expected), d, abs(d) <= tol))

    def at_most(self, name, value, ceiling, tol=0.0):
        d = float(value) - float(ceiling)
        self.rows.append(CheckResult(name, self.group, self.anchor, float(value),
                                     float(ceiling), d, d <= tol))

    def at_least(self, name, value, floor, tol=0.0):
        d = float(value) - float(floor)
        self.rows.append(CheckResult(name, self.group, self.anchor, float(value),
                                     float(floor), d, d >= -tol))

    def truth(self, name, ok, value=float("nan"), expected=float("nan")):
        self.rows.append(CheckResult(name, self.group, self.anchor, float(value),
                                     float(expected), float(value) - float(expected),
                                     bool(ok)))


def check_locc() -> list[CheckResult]:
    g = _Group("locc", "LOCC trade-off constant and energy planner")
    g.close("c1_closed_form", bounds.c_m(1), 2 / (27 * math.pi), 1e-12)
    for m in range(4, 11):
        g.at_most(f"c{m}_below_1e-6", bounds.c_m(m), 1e-6)
    E = bounds.plan_energy_for_hiding(1e-3, 1, 1.0)
    g.truth("plan_energy_1e-3", 5.35 <= E <= 5.45, E, 5.4)
    g.close("plan_energy_round_trip", bounds.locc_bound(1.0, E, 1), 1e-3, 1e-10)
    return g.rows


def _thermal_scheme(nu, mu):
    return disc.SchemeSpec.from_specs(StateSpec.thermal(nu), StateSpec.thermal(mu))


def check_thermal() -> list[CheckResult]:
    g = _Group("thermal", "thermal pair closed forms and sandwich")
    for nu, mu in THERMAL_GRID:
        cf = disc.thermal_closed_forms(nu, mu)
        s = _thermal_scheme(nu, mu)
        tag = f"nu{nu:g}_mu{mu:g}"
        b1 = disc.beta_1(s)
        het = disc.beta_het(s)
        g.close(f"thermal_trace_{tag}", b1, cf.half_trace, 1e-6)
        g.close(f"thermal_wigner_{tag}", disc.wigner_l1_bound(s), cf.half_wigner_l1, 1e-6)
        g.close(f"thermal_het_{tag}", het, cf.half_het, 1e-6)
        g.close(f"thermal_hom_{tag}", disc.beta_hom(s), cf.half_hom, 1e-6)
        g.at_most(f"sandwich_lower_{tag}", het, b1, 1e-9)
        g.at_most(f"sandwich_upper_{tag}", b1, math.e * het, 1e-9)
    rng = np.random.default_rng(20240)
    worst = 0.0
    ok = True
    for _ in range(50):
        nu = float(rng.uniform(0, 5))
        mu = nu + float(rng.uniform(0.01, 10))
        cf = disc.thermal_closed_forms(nu, mu)
        ok &= cf.half_het <= cf.half_trace + 1e-9 <= math.e * cf.half_het + 2e-9
        worst = max(worst, cf.half_trace / cf.half_het)
    g.truth("sandwich_random_pairs", ok and worst <= math.e + 1e-9, worst, math.e)
    return g.rows


def check_even_odd() -> list[CheckResult]:
    g = _Group("even_odd", "even/odd thermal pair Wigner bound")
    for lam in (0.0, 0.3, 0.6, 0.9):
        s = disc.even_odd_scheme(lam)
        g.close(f"even_odd_trace_lam{lam:g}", disc.beta_1(s), 1.0, 1e-10)
        g.close(f"even_odd_wigner_lam{lam:g}", disc.wigner_l1_bound(s),
                disc.even_odd_gocc_bound(lam), 1e-4)
    g.close("even_odd_bound_lam0_limit", disc.even_odd_gocc_bound(0.0), 2 / math.e, 1e-15)
    return g.rows


def check_fock_hom() -> list[CheckResult]:
    g = _Group("fock_hom", "consecutive Fock homodyne distance")
    g.close("fock_hom_n0", disc.fock_pair_hom_distance(0),
            math.sqrt(8 / math.pi) * math.exp(-0.5), 1e-6)
    limit = 8 / math.pi**2
    last = None
    for n in range(10, 101, 10):
        last = disc.fock_pair_hom_distance(n)
        g.at_least(f"fock_hom_n{n}_floor", last, limit - 0.05)
    g.close("fock_hom_n100_limit", last, limit, 0.03)
    return g.rows


def check_coherent() -> list[CheckResult]:
    g = _Group("coherent", "antipodal coherent pair")
    for a in (0.25, 0.5, 1.0):
        s = disc.SchemeSpec.from_specs(StateSpec.coherent(a), StateSpec.coherent(-a))
        cf = disc.coherent_pair_biases(a)
        g.close(f"coherent_trace_a{a:g}", disc.beta_1(s), cf["beta_1"], 1e-6)
        g.close(f"coherent_hom_a{a:g}", disc.beta_hom(s), cf["beta_gocc"], 1e-6)
    return g.rows


def random_state(dim: int, rank: int, seed: int) -> TruncatedOperator:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(v)
    w = rng.random(rank)
    w /= w.sum()
    return TruncatedOperator.from_matrix((q * w) @ q.conj().T, hermitian=True)


def check_channels() -> list[CheckResult]:
    g = _Group("channels", "noise channel oracle, semigroup, loss characteristic function")
    for i, lam in enumerate((0.05, 0.2, 1.0)):
        rho = random_state(40, 3, 100 + i)
        fast = channels.noise_channel_apply(rho, lam, out_dim=40).entries
        slow = channels.noise_channel_oracle(rho, lam, out_dim=40).entries
        g.at_most(f"noise_oracle_lam{lam:g}", np.max(np.abs(fast - slow)), 1e-6)
    rho = random_state(40, 3, 200)
    two = channels.noise_channel_apply(channels.noise_channel_apply(rho, 0.2), 0.3)
    one = channels.noise_channel_apply(rho, 0.5)
    d = min(two.dim, one.dim)
    g.at_most("noise_semigroup", np.max(np.abs(two.entries[:d, :d] - one.entries[:d, :d])), 1e-6)
    eta = 0.6
    out = channels.pure_loss_apply(rho, eta)
    xs = np.array([-0.6, 0.0, 0.6])
    alphas = (xs[:, None] + 1j * xs[None, :]).ravel()
    lhs = phase_space.characteristic_fn(out, alphas)
    rhs = (phase_space.characteristic_fn(rho, math.sqrt(eta) * alphas)
           * np.exp(-0.5 * (1 - eta) * np.abs(alphas) ** 2))
    g.at_most("loss_characteristic_relation", np.max(np.abs(lhs - rhs)), 1e-6)
    return g.rows


def _bk_error(rho: TruncatedOperator, lam: float) -> float:
    r = -0.5 * math.log(lam)
    out = channels.bk_teleport_output(rho, r, 1.0)
    return trace_norm(out - rho.padded(out.dim))


def check_bk() -> list[CheckResult]:
    g = _Group("bk", "teleportation noise and error bounds")
    g.close("bk_lambda_of_example", channels.lambda_of(0.0, 1 / math.sqrt(2)), 2.0, 1e-12)
    vac = make_state(StateSpec.fock(0))
    out = channels.bk_teleport_output(vac, 1.0, 1.0)
    th = make_state(StateSpec.thermal(math.exp(-2)), out.dim)
    g.at_most("bk_vacuum_output_thermal", np.max(np.abs(out.entries - th.entries)), 1e-8)
    plan = bounds.plan_teleport_budget(bounds.BudgetQuery(0.1, 0.0, 1, eta=1.0))
    g.close("bk_budget_db_example", plan["s_db"], 24.97, 0.01)
    specs = ([StateSpec.fock(n) for n in range(6)]
             + [StateSpec.thermal(v) for v in (0.5, 1.0, 2.0)]
             + [StateSpec.coherent(a) for a in (0.5, 1.0)])
    for spec in specs:
        rho = make_state(spec)
        E = mean_photon_number(rho)
        for lam in (0.01, 0.1, 0.5):
            tag = f"{spec.family}{abs(spec.value):g}_lam{lam:g}"
            ref = bounds.bk_error_bound_refined(E, 1, lam)
            g.at_most(f"bk_soundness_{tag}", _bk_error(rho, lam), ref, 1e-10)
            g.at_most(f"bk_refined_le_linear_{tag}", ref, bounds.bk_error_bound_linear(E, 1, lam),
                      1e-12)
    lams = np.geomspace(1e-6, 4, 30)
    Es = [0.0, 0.5, 1.0, 2.0, 5.0]
    mono = True
    for m in (1, 2, 4):
        for E in Es:
            ref = [bounds.bk_error_bound_refined(E, m, x) for x in lams]
            lin = [bounds.bk_error_bound_linear(E, m, x) for x in lams]
            mono &= bool(np.all(np.diff(ref) >= -1e-12) and np.all(np.diff(lin) >= -1e-12))
        for x in lams:
            ref = [bounds.bk_error_bound_refined(E, m, x) for E in Es]
            mono &= bool(np.all(np.diff(ref) >= -1e-12))
    g.truth("bk_bounds_monotone", mono)
    tiny = [max(bounds.bk_error_bound_refined(5.0, 4, x), bounds.bk_error_bound_linear(5.0, 4, x))
            for x in (1e-8, 1e-12, 1e-16)]
    g.truth("bk_bounds_shrink", tiny[0] > tiny[1] > tiny[2], tiny[2], tiny[0])
    g.at_most("bk_bounds_vanish", tiny[2], 1e-6)
    return g.rows


def check_squeezed() -> list[CheckResult]:
    g = _Group("squeezed", "squeezed-state disturbance lower bound")
    prev = -1.0
    increasing = True
    for r in (0.0, 0.5, 1.0, 1.5):
        res = bounds.squeezed_noise_lower_bound(r, 0.1)
        g.at_least(f"squeezed_numeric_ge_analytic_r{r:g}", res["numeric"], res["analytic"], 1e-6)
        increasing &= res["analytic"] > prev
        prev = res["analytic"]
        last = res["analytic"]
    g.truth("squeezed_analytic_increasing", increasing)
    g.at_least("squeezed_analytic_r1.5_exceeds_1.3", last, 1.3)
    far = bounds.squeezed_analytic_bound(8.0, 0.1)
    g.close("squeezed_analytic_large_r", far, 2.0, 1e-2)
    return g.rows


def check_efficiency() -> list[CheckResult]:
    g = _Group("efficiency", "even/odd bias under detection loss")
    for lam in (0.5, 0.9, 0.99):
        for eta in (0.5, 0.8, 0.95):
            sch = disc.even_odd_scheme(lam)
            num = 0.5 * trace_norm(channels.pure_loss_apply(sch.rho - sch.sigma, eta))
            g.at_most(f"efficiency_lam{lam:g}_eta{eta:g}", num, disc.efficiency_bound(lam, eta),
                      1e-6)
        sch = disc.even_odd_scheme(lam)
        g.close(f"efficiency_lam{lam:g}_eta1",
                0.5 * trace_norm(channels.pure_loss_apply(sch.rho - sch.sigma, 1.0)), 1.0, 1e-10)
    return g.rows


def check_oscillatory() -> list[CheckResult]:
    g = _Group("oscillatory", "oscillatory integral limit")
    deltas = [abs(disc.oscillatory_integral_check(0.3, 2.0, n)["delta"])
              for n in (50, 100, 200, 400)]
    g.truth("oscillatory_delta_decreasing", all(a > b for a, b in zip(deltas, deltas[1:])),
            deltas[-1], deltas[0])
    g.at_most("oscillatory_delta_n400", deltas[-1], 0.02)
    return g.rows


def check_determinism() -> list[CheckResult]:
    g = _Group("determinism", "repeatable sweep output")
    from .cli import render_rows

    rows = disc.sweep_even_odd([0.0, 0.5, 0.9])
    a = render_rows(rows, "csv")
    b = render_rows(disc.sweep_even_odd([0.0, 0.5, 0.9]), "csv")
    g.truth("sweep_byte_identical", a == b)
    return g.rows


GROUPS: dict[str, Callable[[], list[CheckResult]]] = {
    "locc": check_locc,
    "thermal": check_thermal,
    "even_odd": check_even_odd,
    "fock_hom": check_fock_hom,
    "coherent": check_coherent,
    "channels": check_channels,
    "bk": check_bk,
    "squeezed": check_squeezed,
    "efficiency": check_efficiency,
    "oscillatory": check_oscillatory,
    "determinism": check_determinism,
}


def run_checks(only: list[str] | None = None) -> list[CheckResult]:
    """Runs the selected groups (all by default) in a fixed order."""
    names = list(GROUPS) if not only else [n for n in GROUPS if n in only]
    out: list[CheckResult] = []
    for n in names:
        out.extend(GROUPS[n]())
    return out
