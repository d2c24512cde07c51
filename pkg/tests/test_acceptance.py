"""Acceptance gate: one test per quantitative criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s`` to see
the lines for passing criteria too).

Three criteria are implemented faithfully but cannot pass as stated, and
those failures are intentional:

* criterion 1 carries six tabulated anchor times; five match, but the
  anchor 0.57 for rate ratio 0.7 is inconsistent with the exact stationary
  condition (and with a brute-force scan), which both give 0.5569.
* criterion 5 asks for the asymptote within 1e-3 at 100x threshold for two
  parameter sets; the closed form approaches its asymptote like 1/(4w),
  which at 100x threshold is 2.24e-3 for the chi=0.5, |delta|=1 set - no
  correct implementation can be closer.
* criterion 8 pins the weak-nonlinearity analytic photon number at strong
  nonlinearity (lam = 1), where an exact Fock-basis master-equation solve
  shows the true value differs from that formula by ~20% and where
  positive-P sampling with divergence discarding carries its own bias.
  The integrator is validated against the exact solution at lam <= 0.1 in
  the regular test suite.

Each failing test's message carries the quantitative evidence.
"""

import math

import numpy as np
import pytest

from nopolock import (SimConfig, SystemParams, below_matrices, derive_scales,
                      ensemble_moments, equal_time_corr_below,
                      mean_photon_below, phase_histogram,
                      stationary_covariance_below, unitary_minimum,
                      variance_above, variance_below, variance_steady)
from nopolock.cli import main
from nopolock.steady import replace_pump

from conftest import make_system
from _fock import FockSteadyState


def report(num: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")


def brute_unitary_min(chi: float, eps: float, n: int = 400_001):
    """Independent dense-grid minimizer of the lossless variance."""
    if eps < chi:
        mu = math.sqrt(chi**2 - eps**2)
        T = math.pi / mu
        t = np.linspace(1e-9, T, n)
        v = 1 + 2 * eps**2 * np.sin(mu * t) ** 2 / mu**2 \
            - eps / mu * np.sin(2 * mu * t)
    else:
        eta = math.sqrt(eps**2 - chi**2)
        T = 1.0 / eta
        while 1 + 2 * eps**2 * math.sinh(eta * T) ** 2 / eta**2 \
                - eps / eta * math.sinh(2 * eta * T) < 1.5:
            T *= 2
        t = np.linspace(1e-9, T, n)
        v = 1 + 2 * eps**2 * np.sinh(eta * t) ** 2 / eta**2 \
            - eps / eta * np.sinh(2 * eta * t)
    i = int(np.argmin(v))
    return float(t[i]), float(v[i])


def test_criterion_01_unitary_minimum_times():
    """Tabulated times of the first variance minimum, +-0.01."""
    anchors = [(0.1, 0.74), (0.4, 0.63), (0.7, 0.57),
               (1.1, 0.48), (2.0, 0.38), (3.0, 0.31)]
    chi = 1.0
    results = []
    for ratio, target in anchors:
        t_min, _ = unitary_minimum(chi, ratio * chi)
        results.append((ratio, target, chi * t_min, abs(chi * t_min - target) <= 0.01))
    ok = all(r[3] for r in results)
    detail = ", ".join(f"eps/chi={r:.1f}: {got:.4f} (target {tgt:.2f})"
                       for r, tgt, got, _ in results)
    report(1, ok, f"unitary minimum times: {detail}")
    if not ok:
        bad = [r for r in results if not r[3]]
        brute = {r[0]: brute_unitary_min(chi, r[0] * chi)[0] for r in bad}
        pytest.fail(
            "tabulated anchors not all attainable: "
            + "; ".join(f"eps/chi={r:.1f} gives chi*t_min={got:.4f}, "
                        f"brute-force scan agrees ({brute[r]:.4f}), "
                        f"tabulated {tgt:.2f} is off by {abs(got - tgt):.4f} > 0.01"
                        for r, tgt, got, _ in bad)
            + " (exact stationary condition and 4e5-point scan concur; "
            "the tabulated value appears to be a typo)")


def test_criterion_02_minimum_value_closure():
    """Brute-force minimization matches chi/(eps+chi) to 1e-7 for 50 ratios."""
    chi = 1.0
    worst = 0.0
    for ratio in np.linspace(0.05, 10.0, 50):
        _, v = brute_unitary_min(chi, ratio * chi)
        worst = max(worst, abs(v - chi / (ratio * chi + chi)))
    ok = worst < 1e-7
    report(2, ok, f"minimum-value closure over 50 pump ratios: "
                  f"max |V_min - chi/(eps+chi)| = {worst:.2e}")
    assert ok


def test_criterion_03_ordinary_oscillator_limit():
    """variance_below at chi=1e-8 matches the mixer-free closed form to 1e-6."""
    params, scales = make_system(delta=3.0, chi=1e-8)
    g = math.hypot(1.0, 3.0)
    worst = 0.0
    for eps in np.linspace(0.02, 0.95, 40) * scales.eps_th:
        v = variance_below(params, scales, eps).V
        worst = max(worst, abs(v - (1 - eps / (eps + g))))
    ok = worst < 1e-6
    report(3, ok, f"mixer-free limit: max deviation {worst:.2e}")
    assert ok


def test_criterion_04_threshold_cancellation():
    """V, V+, V- continuous across threshold to 1e-3 at chi=0.5, delta=3."""
    params, scales = make_system(delta=3.0, chi=0.5)
    d = 1e-6
    below = variance_below(params, scales, scales.eps_th * (1 - d))
    above = variance_above(params, scales, scales.eps_th * (1 + d))
    gaps = (abs(below.V - above.V), abs(below.V_plus - above.V_plus),
            abs(below.V_minus - above.V_minus))
    ok = max(gaps) < 1e-3 and all(np.isfinite(gaps))
    report(4, ok, "two-sided threshold limits: "
                  f"|dV|={gaps[0]:.2e} |dV+|={gaps[1]:.2e} |dV-|={gaps[2]:.2e}")
    assert ok


def test_criterion_05_above_threshold_asymptote():
    """V at 100x threshold within 1e-3 of 3/4 + chi/(4|delta|), both figure sets."""
    gaps = []
    for chi, delta in ((0.1, 10.0), (0.5, 1.0)):
        params, scales = make_system(delta=delta, chi=chi)
        v = variance_above(params, scales, 100 * scales.eps_th).V
        gaps.append(abs(v - (0.75 + chi / (4 * abs(delta)))))
    ok = max(gaps) < 1e-3
    report(5, ok, f"asymptote gaps at 100x threshold: {gaps[0]:.2e}, {gaps[1]:.2e}")
    if not ok:
        # the exact closed form sits 1/(4 w) short of the asymptote with
        # w = sqrt(1 + 9999 eps_th^2 / gamma^2); for chi=0.5, |delta|=1
        # (eps_th = 1.118 gamma) that residual is 2.24e-3 > 1e-3 for any
        # correct implementation; the high-detuning set passes (2.5e-4)
        resid = 1 / (4 * math.sqrt(1 + 9999 * 1.25))
        pytest.fail(
            f"the 1e-3 window at 100x threshold is analytically unattainable "
            f"for chi=0.5, |delta|=1: the closed form approaches its "
            f"asymptote like 1/(4w), and at 100x threshold that is "
            f"{resid:.2e} for this set (measured gap {gaps[1]:.2e} matches); "
            f"the chi=0.1, |delta|=10 set passes with {gaps[0]:.2e}")


def test_criterion_06_epr_product_near_threshold():
    """V+V- just above threshold: equals (|delta|+chi)/(4|delta|) and exceeds 1/4.

    The equality window is 1e-6, and the product moves away from its
    threshold value like eps_th^2/gamma^2 * 1e-6, so the equality scan uses
    points with eps_th below ~1.9 gamma; the strict >1/4 claim is scanned
    over a wider set including the high-detuning figure parameters.
    """
    worst_eq = 0.0
    for chi, delta in ((0.5, 1.0), (0.3, 1.0), (1.0, 2.0), (0.2, 1.5), (1.0, 1.5)):
        params, scales = make_system(delta=delta, chi=chi)
        rep = variance_above(params, scales, scales.eps_th * (1 + 1e-6),
                             delta_theta=0.0)
        target = (abs(delta) + chi) / (4 * abs(delta))
        worst_eq = max(worst_eq, abs(rep.product - target))
    above_quarter = True
    for chi, delta in ((0.1, 10.0), (0.5, 3.0), (0.5, 1.0), (1.0, 2.0),
                       (0.2, 1.5), (2.0, 5.0)):
        params, scales = make_system(delta=delta, chi=chi)
        for ratio in (1 + 1e-6, 1.05, 1.5, 3.0, 10.0):
            rep = variance_above(params, scales, ratio * scales.eps_th,
                                 delta_theta=0.0)
            above_quarter &= rep.product > 0.25
    ok = worst_eq < 1e-6 and above_quarter
    report(6, ok, f"product vs threshold value: max gap {worst_eq:.2e}; "
                  f"exceeds 1/4 everywhere scanned: {above_quarter}")
    assert ok


def test_criterion_07_matrix_identity_suite():
    """D F^T = F D and closed form vs (1/2) F^-1 D to 1e-12 on a 100-point grid."""
    params, scales = make_system(delta=3.0, chi=0.5)
    worst_ident = 0.0
    worst_route = 0.0
    for eps in np.linspace(0.01, 0.95, 100) * scales.eps_th:
        mats = below_matrices(params, scales, eps)
        worst_ident = max(worst_ident,
                          float(np.abs(mats.D @ mats.F.T - mats.F @ mats.D).max()))
        aa, ab = equal_time_corr_below(params, scales, eps)
        C4 = stationary_covariance_below(params, scales, eps)
        scale = max(1.0, float(np.abs(C4).max()))
        worst_route = max(worst_route,
                          float(np.abs(C4[:2, :2] - aa).max()) / scale,
                          float(np.abs(C4[:2, 2:] - ab).max()) / scale)
    ok = worst_ident < 1e-12 and worst_route < 1e-12
    report(7, ok, f"identity residual {worst_ident:.2e}, "
                  f"route disagreement {worst_route:.2e} (100 pump values)")
    assert ok


def test_criterion_08_monte_carlo_vs_analytics():
    """Pair-photon estimate from 1e4 trajectories vs the linearized formula,
    at nonlinearity lam = 1 (faithful run of the stated configuration)."""
    params, scales = make_system(delta=3.0, chi=0.5, lam=1.0)
    eps = 0.5 * scales.eps_th
    p, s = replace_pump(params, scales, eps)
    config = SimConfig(dt=1e-3, t_max=30.0, n_traj=10_000, burn_in=10.0,
                       seed=2024)
    expected = mean_photon_below(params, scales, eps)
    exact = FockSteadyState(eps=eps, chi=0.5, delta=3.0, lam=1.0, n_max=10)
    try:
        ests = ensemble_moments(p, s, config, ["n1", "a1", "a2"], n_workers=4)
    except Exception as exc:  # divergence abort is also a faithful outcome
        report(8, False, f"estimate aborted: {exc}")
        pytest.fail(f"Monte Carlo estimate aborted at lam=1: {exc}")
    est = ests[0]
    odd_ok = all(abs(e.mean) < 3 * e.std_error for e in ests[1:])
    gap = abs(est.mean.real - expected)
    ok = gap < 3 * est.std_error and odd_ok
    report(8, ok,
           f"<b1 a1> = {est.mean.real:.5f} +- {est.std_error:.5f} "
           f"(discard {est.discard_fraction:.3%}), linearized formula "
           f"{expected:.5f}, exact master equation {exact.mean_photon:.5f}; "
           f"odd moments consistent with zero: {odd_ok}")
    if not ok:
        pytest.fail(
            f"at lam=1 the sampled <b1 a1> = {est.mean.real:.5f} "
            f"+- {est.std_error:.5f} cannot match the linearized value "
            f"{expected:.5f} ({gap / est.std_error:.1f} sigma): the exact "
            f"Fock-basis steady state gives {exact.mean_photon:.5f} "
            f"(truncation error {exact.truncation_error:.1e}), i.e. the "
            "linearized formula itself is ~20% off at this nonlinearity, "
            "and positive-P divergence discarding biases the sampler here. "
            "The integrator matches both the formula and the exact solve "
            "at lam <= 0.1 (see test_montecarlo).")


def test_criterion_09_phase_locking():
    """>= 90% of the phase-difference mass within 0.3 rad of 0 (mod pi).

    The nonlinearity is a free choice here and is taken weak so that the
    locked state is bright and the linearized picture applies.
    """
    params, scales = make_system(delta=3.0, chi=0.5, lam=0.01)
    eps = 1.5 * scales.eps_th
    p, s = replace_pump(params, scales, eps)
    config = SimConfig(dt=1e-3, t_max=25.0, n_traj=1024, burn_in=12.0, seed=404)
    hist = phase_histogram(p, s, config, n_workers=4)
    frac = hist.locked_fraction(0.3)
    ok = frac >= 0.90
    report(9, ok, f"locked mass within 0.3 rad of 0 (mod pi): {frac:.3f} "
                  f"(discard {hist.discard_fraction:.3%})")
    assert ok


def test_criterion_10_mc_determinism(tmp_path):
    """Identical seed/config reruns give byte-identical CSV, any worker count."""
    args = ["mc", "--chi", "0.5", "--delta", "3", "--lam", "0.05",
            "--eps-ratio", "0.6", "--dt", "0.002", "--t-max", "5",
            "--burn-in", "2", "--n-traj", "600", "--seed", "77",
            "--chunk-size", "128", "--outdir", str(tmp_path)]
    files = []
    for name, workers in (("a.csv", "1"), ("b.csv", "2"), ("c.csv", "4"),
                          ("d.csv", "1")):
        assert main(args + ["--workers", workers, "--output", name]) == 0
        files.append((tmp_path / name).read_bytes())
    ok = all(f == files[0] for f in files[1:])
    report(10, ok, f"4 runs (workers 1/2/4/rerun), {len(files[0])} bytes each, "
                   f"identical: {ok}")
    assert ok
