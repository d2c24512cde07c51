"""Two-mode squeezing variances and entanglement verdicts.

The entanglement measures are the variances of the quadrature distance
``X1 - X2`` and total momentum ``Y1 + Y2`` (vacuum level normalized to 1),

    V_minus = V(X1 - X2),   V_plus = V(Y1 + Y2),
    V = (V_plus + V_minus) / 2,

with ``X_k, Y_k`` measured at local-oscillator angles ``theta_k``.  The
state is inseparable when ``V < 1`` (sum criterion) and strongly
EPR-correlated when ``V_plus * V_minus < 1/4`` (product criterion).

Everything reduces to four second-order moments per regime: the mean
photon number ``n``, the pair moment ``<a1 a2>``, the single-mode squared
moment ``<a1^2>`` (equal for both modes by symmetry) and the polarization
cross moment ``<a1+ a2>``.  Above threshold the moments are understood as
cumulants (mean-field part removed).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ParameterDomainError, RegimeError, SingularParameterError
from .fluctuations import above_matrices, equal_time_corr_below, near_threshold
from .params import DerivedScales, QuadratureAngles, SystemParams, wrap_angle
from .steady import steady_state

FLAG_OK = "ok"
FLAG_NEAR_THRESHOLD = "linearization-unreliable"

#: within this relative distance of threshold the below-threshold closed
#: forms lose all floating-point precision to cancellation; the threshold
#: limit is served exactly by the above-threshold evaluator instead
_THRESHOLD_HANDOFF = 1e-9


@dataclass(frozen=True)
class MomentSet:
    """Second-order moments from which all quadrature variances derive.

    ``phi_arg`` caches ``arg <a1 a2>``; the single field ``m_a1sq`` stores
    both single-mode squared moments, equal by the 1 <-> 2 symmetry.
    """

    n: float
    m_aa: complex
    m_a1sq: complex
    m_cross: complex

    def __post_init__(self) -> None:
        if self.n < -1e-12:
            raise ParameterDomainError(f"mean photon number must be >= 0, got {self.n}")

    @property
    def phi_arg(self) -> float:
        return cmath.phase(self.m_aa) if self.m_aa != 0 else 0.0


@dataclass(frozen=True)
class VarianceReport:
    """Variances, criterion verdicts and the angles they were evaluated at."""

    V: float
    R: float
    V_plus: float
    V_minus: float
    product: float
    inseparable: bool
    strong_epr: bool
    angles: QuadratureAngles
    flag: str = FLAG_OK


def variances_from_moments(moments: MomentSet, angles: QuadratureAngles,
                           flag: str = FLAG_OK) -> VarianceReport:
    """Exact quadrature variances of a symmetric two-mode Gaussian-moment set.

    ``V_plus``/``V_minus`` follow from the second-moment expansion of
    ``V(Y1 + Y2)`` and ``V(X1 - X2)``; they obey ``V_pm = V +- R cos(delta
    theta)`` with an angle-independent ``R`` whenever the cross moment
    ``<a1+ a2>`` is real (true in every regime of this model).
    """
    st, dt = angles.sigma_theta, angles.delta_theta
    eis = cmath.exp(1j * st)
    n, m_aa, m_sq, m_x = moments.n, moments.m_aa, moments.m_a1sq, moments.m_cross

    V = 1 + 2 * n - 2 * (m_aa * eis).real
    split = 2 * (m_sq * eis).real * math.cos(dt) - 2 * (m_x * cmath.exp(1j * dt)).real
    V_minus = V + split
    V_plus = V - split
    if abs(math.cos(dt)) > 1e-12:
        R = -split / math.cos(dt)
    else:
        R = 2 * m_x.real - 2 * (m_sq * eis).real
    product = V_plus * V_minus
    return VarianceReport(V=V, R=R, V_plus=V_plus, V_minus=V_minus,
                          product=product, inseparable=V < 1,
                          strong_epr=product < 0.25, angles=angles, flag=flag)


def optimal_angle_sum(moments: MomentSet, params: SystemParams | None = None,
                      delta_theta: float = 0.0) -> QuadratureAngles:
    """Angle choice minimizing ``V``: ``sigma_theta = -arg <a1 a2>``.

    A vanishing pair moment leaves the sum angle free; zero is returned
    with the ``degenerate`` flag set.
    """
    if moments.m_aa == 0:
        return QuadratureAngles.from_sums(0.0, delta_theta, params, degenerate=True)
    return QuadratureAngles.from_sums(wrap_angle(-moments.phi_arg), delta_theta, params)


# ---------------------------------------------------------------------------
# steady-state regimes


def moments_below(params: SystemParams, scales: DerivedScales,
                  eps: float) -> MomentSet:
    """Moments of the below-threshold stationary state."""
    corr_aa, corr_ab = equal_time_corr_below(params, scales, eps)
    return MomentSet(n=corr_ab[0, 0].real, m_aa=complex(corr_aa[0, 1]),
                     m_a1sq=complex(corr_aa[0, 0]), m_cross=complex(corr_ab[1, 0]))


def moments_above(params: SystemParams, scales: DerivedScales,
                  eps: float) -> MomentSet:
    """Fluctuation cumulants of the locked above-threshold state.

    Assembled from the (+)/(-) covariances through the number/phase
    parametrization ``d_alpha = e^{i phi0} (dn/(2 sqrt(n0)) + i sqrt(n0)
    dphi)``; the mean-field contribution is excluded.
    """
    mats = above_matrices(params, scales, eps)
    state = steady_state(params, scales, eps, branch="+")
    n0 = mats.n0
    Np, Kp, Pp = mats.C_plus[0, 0], mats.C_plus[0, 1], mats.C_plus[1, 1]
    Nm, Km, Pm = mats.C_minus[0, 0], mats.C_minus[0, 1], mats.C_minus[1, 1]

    n_c = (Np + Nm) / (16 * n0) + n0 * (Pp + Pm) / 4
    m_aa = ((Np - Nm) / (16 * n0) - n0 * (Pp - Pm) / 4 + 1j * (Kp - Km) / 4)
    m_sq = ((Np + Nm) / (16 * n0) - n0 * (Pp + Pm) / 4 + 1j * (Kp + Km) / 4)
    m_x = (Np - Nm) / (16 * n0) + n0 * (Pp - Pm) / 4

    phase_sum, phase_diff = state.phase_sum, state.phase_diff
    return MomentSet(
        n=n_c,
        m_aa=cmath.exp(1j * phase_sum) * m_aa,
        m_a1sq=cmath.exp(1j * (phase_sum - phase_diff)) * m_sq,
        m_cross=cmath.exp(1j * phase_diff) * m_x,
    )


def variance_below(params: SystemParams, scales: DerivedScales, eps: float,
                   delta_theta: float = 0.0) -> VarianceReport:
    """Minimized-angle variances in the below-threshold regime.

    The usable domain stops a relative :data:`_THRESHOLD_HANDOFF` short of
    threshold: closer in, the correlator denominators cancel to roundoff
    and the (finite, continuous) variance limits must be taken from
    :func:`variance_above` instead.
    """
    if not 0 <= eps < scales.eps_th * (1 - _THRESHOLD_HANDOFF):
        raise RegimeError(f"eps = {eps:.6g} outside the below-threshold range "
                          f"[0, {scales.eps_th:.6g}); at threshold use the "
                          "above-threshold evaluator for the limit values")
    if eps == 0.0:
        angles = QuadratureAngles.from_sums(0.0, delta_theta, params, degenerate=True)
        return variances_from_moments(MomentSet(0.0, 0j, 0j, 0j), angles)
    moments = moments_below(params, scales, eps)
    angles = optimal_angle_sum(moments, params, delta_theta)
    flag = FLAG_NEAR_THRESHOLD if near_threshold(scales, eps) else FLAG_OK
    return variances_from_moments(moments, angles, flag=flag)


def variance_above(params: SystemParams, scales: DerivedScales, eps: float,
                   delta_theta: float = 0.0) -> VarianceReport:
    """Variances in the locked above-threshold regime (closed forms).

    The local-oscillator sum angle is locked to the semiclassical phase
    sum.  The closed forms stay finite arbitrarily close to threshold: the
    divergences of individual correlation entries cancel in ``V`` and
    ``V_pm``.
    """
    gamma = params.gamma1
    if not params.is_symmetric:
        raise ParameterDomainError("variance_above requires symmetric parameters")
    delta, chi = params.delta1, params.chi
    if delta == 0:
        raise SingularParameterError(
            "above-threshold variances divide by |delta|; delta = 0 is singular")
    if eps < scales.eps_th * (1 - _THRESHOLD_HANDOFF):
        raise RegimeError(f"eps = {eps:.6g} is below threshold {scales.eps_th:.6g}")

    ad = abs(delta)
    w = math.sqrt(1 + max(0.0, eps**2 - scales.eps_th**2) / gamma**2)
    V = 0.75 - 1 / (4 * w) + chi / (4 * ad)
    R = math.copysign(1.0, delta) / 4 * (1 / w - (ad - chi) / ad)
    V_plus = V + R * math.cos(delta_theta)
    V_minus = V - R * math.cos(delta_theta)
    product = V_plus * V_minus

    if eps > scales.eps_th:
        sigma = wrap_angle(-steady_state(params, scales, eps, "+").phase_sum)
    else:
        sigma = 0.0
    angles = QuadratureAngles.from_sums(sigma, delta_theta, params)
    flag = FLAG_NEAR_THRESHOLD if near_threshold(scales, eps) else FLAG_OK
    return VarianceReport(V=V, R=R, V_plus=V_plus, V_minus=V_minus,
                          product=product, inseparable=V < 1,
                          strong_epr=product < 0.25, angles=angles, flag=flag)


def variance_steady(params: SystemParams, scales: DerivedScales, eps: float,
                    delta_theta: float = 0.0, regime: str = "auto") -> VarianceReport:
    """Dispatch to the regime-appropriate steady-state evaluator.

    ``auto`` switches at threshold; the hand-off band immediately below
    threshold is served by the above-threshold evaluator, whose closed
    forms are exact at the (continuous) threshold limit.
    """
    below_edge = scales.eps_th * (1 - _THRESHOLD_HANDOFF)
    if regime == "below" or (regime == "auto" and eps < below_edge):
        return variance_below(params, scales, eps, delta_theta)
    if regime == "above" or regime == "auto":
        return variance_above(params, scales, eps, delta_theta)
    raise ParameterDomainError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# unitary (lossless, short-time) evolution at zero detuning

#: |chi - eps| below this relative size switches to the degenerate-rate series
_BOUNDARY_RTOL = 1e-12


def _unitary_nm(chi: float, eps: float, t: float) -> tuple[float, complex, complex]:
    """(n, <a1 a2>, <a1^2>) of the unitarily evolved vacuum at time ``t``."""
    scale = max(chi, eps, 1e-300)
    if abs(chi - eps) <= _BOUNDARY_RTOL * scale:
        return eps**2 * t**2, eps * t + 0j, -1j * chi * eps * t**2
    if eps < chi:
        mu = math.sqrt(chi**2 - eps**2)
        s, s2 = math.sin(mu * t), math.sin(2 * mu * t)
        return eps**2 * s**2 / mu**2, eps * s2 / (2 * mu) + 0j, -1j * chi * eps * s**2 / mu**2
    eta = math.sqrt(eps**2 - chi**2)
    sh, sh2 = math.sinh(eta * t), math.sinh(2 * eta * t)
    return eps**2 * sh**2 / eta**2, eps * sh2 / (2 * eta) + 0j, -1j * chi * eps * sh**2 / eta**2


def unitary_moments(chi: float, eps: float, t: float) -> MomentSet:
    """Moment set of the lossless zero-detuning evolution from vacuum."""
    if t < 0:
        raise ParameterDomainError("time must be non-negative")
    if chi < 0 or eps < 0:
        raise ParameterDomainError("chi and eps must be non-negative")
    n, m_aa, m_sq = _unitary_nm(chi, eps, t)
    return MomentSet(n=n, m_aa=m_aa, m_a1sq=m_sq, m_cross=0j)


def unitary_variance(chi: float, eps: float, t: float,
                     sigma_theta: float = 0.0) -> float:
    """Two-mode variance ``V`` under lossless zero-detuning evolution.

    Oscillatory for ``eps < chi`` (period ``pi/sqrt(chi^2 - eps^2)`` in
    ``t``), exponentially growing for ``eps > chi``; ``V(0) = 1``.
    """
    if t < 0:
        raise ParameterDomainError("time must be non-negative")
    if chi < 0 or eps < 0:
        raise ParameterDomainError("chi and eps must be non-negative")
    n, m_aa, _ = _unitary_nm(chi, eps, t)
    return 1 + 2 * n - 2 * (m_aa * cmath.exp(1j * sigma_theta)).real


def unitary_minimum(chi: float, eps: float) -> tuple[float, float]:
    """First time and value of the variance minimum at ``cos(sigma_theta) = 1``.

    Solved by bisection of ``dV/dt`` over the first monotonic interval;
    the minimum value equals ``chi / (eps + chi)`` in both rate regimes.
    """
    if chi <= 0 or eps <= 0:
        raise ParameterDomainError("unitary_minimum requires chi > 0 and eps > 0")
    scale = max(chi, eps)
    if abs(chi - eps) <= _BOUNDARY_RTOL * scale:
        t = 1 / (2 * eps)
        return t, unitary_variance(chi, eps, t)

    if eps < chi:
        mu = math.sqrt(chi**2 - eps**2)

        def dv(t: float) -> float:
            return (2 * eps**2 / mu) * math.sin(2 * mu * t) - 2 * eps * math.cos(2 * mu * t)

        lo, hi = 0.0, math.pi / (2 * mu)
    else:
        eta = math.sqrt(eps**2 - chi**2)

        def dv(t: float) -> float:
            return (2 * eps**2 / eta) * math.sinh(2 * eta * t) - 2 * eps * math.cosh(2 * eta * t)

        lo, hi = 0.0, 1 / (2 * eta)
        while dv(hi) < 0:
            hi *= 2

    tol = 1e-12 / chi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if dv(mid) < 0:
            lo = mid
        else:
            hi = mid
    t_min = 0.5 * (lo + hi)
    return t_min, unitary_variance(chi, eps, t_min)


def unitary_period(chi: float, eps: float) -> float:
    """Period of ``V(t)`` in the oscillatory regime ``eps < chi``."""
    if eps >= chi:
        raise RegimeError("the variance is periodic only for eps < chi")
    return math.pi / math.sqrt(chi**2 - eps**2)
