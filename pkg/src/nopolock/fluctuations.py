"""Linearized quantum fluctuations: drift/diffusion matrices and correlators.

Below threshold the fluctuations of ``(d_alpha1, d_alpha2, d_beta1,
d_beta2)`` around the zero solution obey a linear Langevin system

    d/dt dx = -F dx + R,   <R(t) R(t')^T> = D delta(t - t'),

whose stationary covariance is ``C = (1/2) F^-1 D`` thanks to the operator
identity ``D F^T = F D`` satisfied by this model.  Above threshold the
number/phase deviations decouple into independent sum (+) and difference
(-) pairs, each again a 2x2 linear Langevin system; their stationary
covariances are evaluated from closed forms.

Sign conventions here follow the linearization of the stochastic equations
(so that photon numbers come out positive); consequently the off-diagonal
blocks of ``F`` carry ``-eps`` where the corresponding diffusion blocks
carry ``+eps``.

All entries are covariances of the doubled-phase-space variables, i.e.
normal-ordered moments; individual entries may be negative or diverge at
threshold even though every physical variance assembled from them stays
finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ParameterDomainError, RegimeError, SingularParameterError
from .params import DerivedScales, SystemParams
from .steady import steady_state

#: relative half-width of the pump band around threshold inside which the
#: linearized treatment is flagged unreliable
NEAR_THRESHOLD_BAND = 0.05

_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _require_symmetric(params: SystemParams) -> tuple[float, float, float]:
    if not params.is_symmetric:
        raise ParameterDomainError(
            "linearized correlators are implemented for symmetric parameters "
            "(gamma1 == gamma2 and delta1 == delta2)")
    return params.gamma1, params.delta1, params.chi


def near_threshold(scales: DerivedScales, eps: float) -> bool:
    """Whether ``eps`` lies in the band where linearization is unreliable."""
    return abs(eps - scales.eps_th) < NEAR_THRESHOLD_BAND * scales.eps_th


@dataclass(frozen=True)
class BelowThresholdMatrices:
    """Drift ``F``, diffusion ``D`` and the scalar ``s_sq`` below threshold.

    ``F`` has the block structure ``[[A, B], [conj(B), conj(A)]]``;
    ``s_sq = gamma^2 + chi^2 + delta^2 - eps^2`` is the scalar controlling
    the stationary correlators, strictly positive below threshold.
    """

    F: np.ndarray
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    s_sq: float


def below_matrices(params: SystemParams, scales: DerivedScales,
                   eps: float) -> BelowThresholdMatrices:
    """Linearized drift and diffusion around the zero solution."""
    gamma, delta, chi = _require_symmetric(params)
    if eps < 0:
        raise ParameterDomainError("eps must be non-negative")
    if eps >= scales.eps_th:
        raise RegimeError(
            f"eps = {eps:.6g} is at or above threshold {scales.eps_th:.6g}; "
            "use the above-threshold path")
    A = np.array([[gamma + 1j * delta, 1j * chi],
                  [1j * chi, gamma + 1j * delta]])
    B = -eps * _X.astype(complex)
    F = np.block([[A, B], [B.conj(), A.conj()]])
    D = np.block([[eps * _X, np.zeros((2, 2))],
                  [np.zeros((2, 2)), eps * _X]]).astype(complex)
    ident = np.abs(D @ F.T - F @ D).max()
    if ident > 1e-12 * max(1.0, eps * gamma):
        raise AssertionError(f"drift/diffusion identity violated: {ident:.3e}")
    s_sq = gamma**2 + chi**2 + delta**2 - eps**2
    return BelowThresholdMatrices(F=F, A=A, B=B, D=D, s_sq=s_sq)


def _corr_closed_below(params: SystemParams, scales: DerivedScales,
                       eps: float) -> tuple[np.ndarray, np.ndarray]:
    gamma, delta, chi = params.gamma1, params.delta1, params.chi
    s2 = gamma**2 + chi**2 + delta**2 - eps**2
    den = s2**2 - 4 * delta**2 * chi**2
    corr_aa = eps / (2 * den) * (
        gamma * np.array([[-2 * chi * delta, s2], [s2, -2 * chi * delta]])
        - 1j * np.array([[chi * (s2 - 2 * delta**2), delta * (s2 - 2 * chi**2)],
                         [delta * (s2 - 2 * chi**2), chi * (s2 - 2 * delta**2)]]))
    corr_ab = eps**2 / (2 * den) * np.array([[s2, -2 * chi * delta],
                                             [-2 * chi * delta, s2]])
    return corr_aa, corr_ab.astype(complex)


def stationary_covariance_below(params: SystemParams, scales: DerivedScales,
                                eps: float) -> np.ndarray:
    """Full 4x4 stationary covariance ``(1/2) F^-1 D``."""
    mats = below_matrices(params, scales, eps)
    return 0.5 * np.linalg.solve(mats.F, mats.D)


def equal_time_corr_below(params: SystemParams, scales: DerivedScales,
                          eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Stationary ``<d_alpha d_alpha^T>`` and ``<d_alpha d_beta^T>`` blocks.

    The closed forms are returned; away from threshold they are checked
    elementwise (to 1e-12 of their scale) against the generic
    ``(1/2) F^-1 D`` route, which loses accuracy as ``F`` approaches
    singularity at threshold.
    """
    mats = below_matrices(params, scales, eps)  # validates regime
    corr_aa, corr_ab = _corr_closed_below(params, scales, eps)
    if eps <= 0.999 * scales.eps_th:
        C4 = 0.5 * np.linalg.solve(mats.F, mats.D)
        scale = max(1.0, float(np.abs(C4).max()))
        err = max(np.abs(C4[:2, :2] - corr_aa).max(),
                  np.abs(C4[:2, 2:] - corr_ab).max())
        if err > 1e-12 * scale:
            raise AssertionError(
                f"closed-form and generic equal-time correlators disagree: {err:.3e}")
    return corr_aa, corr_ab


def temporal_corr_below(params: SystemParams, scales: DerivedScales,
                        eps: float, tau: float) -> np.ndarray:
    """Two-time covariance ``<dx(t + tau) dx(t)^T>`` of the 4-vector.

    Equals ``expm(-F*tau) C`` for ``tau >= 0`` and ``C expm(-F^T*|tau|)``
    for ``tau < 0``; at ``tau = 0`` it reduces to the stationary covariance.
    """
    mats = below_matrices(params, scales, eps)
    C4 = 0.5 * np.linalg.solve(mats.F, mats.D)
    if tau >= 0:
        return expm(-mats.F * tau) @ C4
    return C4 @ expm(-mats.F.T * abs(tau))


def mean_photon_below(params: SystemParams, scales: DerivedScales,
                      eps: float) -> float:
    """Stationary mean photon number per mode below threshold."""
    gamma, delta, chi = _require_symmetric(params)
    if not 0 <= eps < scales.eps_th:
        raise RegimeError(f"eps = {eps:.6g} outside [0, eps_th)")
    s2 = gamma**2 + chi**2 + delta**2 - eps**2
    return eps**2 * s2 / (2 * (s2**2 - 4 * delta**2 * chi**2))


@dataclass(frozen=True)
class AboveThresholdMatrices:
    """Decoupled (+)/(-) drift, diffusion and stationary covariances.

    The (+) pair is ``(dn2 + dn1, dphi2 + dphi1)``, the (-) pair the
    differences.  ``C_plus``/``C_minus`` come from closed forms; ``F_minus``
    and ``D_minus`` are reconstructed from the linearized dynamics (the
    difference-pair diffusion is fixed by ``D = 2 F C``) and satisfy
    ``D_minus == -D_plus``.  Cross-correlations between the (+) and (-)
    pairs vanish identically.
    """

    F_plus: np.ndarray
    F_minus: np.ndarray
    D_plus: np.ndarray
    D_minus: np.ndarray
    C_plus: np.ndarray
    C_minus: np.ndarray
    n0: float
    sin_phase_sum: float
    near_threshold: bool


def above_matrices(params: SystemParams, scales: DerivedScales,
                   eps: float) -> AboveThresholdMatrices:
    """Fluctuation matrices around the stable locked solution."""
    gamma, delta, chi = _require_symmetric(params)
    if delta == 0:
        raise SingularParameterError(
            "above-threshold fluctuation formulas divide by |delta|; "
            "delta = 0 is a singular parameter point")
    if chi <= 0:
        raise ParameterDomainError("above-threshold locked fluctuations require chi > 0")
    if eps <= scales.eps_th:
        raise RegimeError(
            f"eps = {eps:.6g} is at or below threshold {scales.eps_th:.6g}; "
            "use the below-threshold path")

    state = steady_state(params, scales, eps, branch="+")
    n0 = state.n10
    lam = scales.lam
    sg = math.copysign(1.0, delta)
    ad = abs(delta)
    ch = chi - ad
    sin_sum = math.sin(state.phase_sum)

    F_plus = np.array([[2 * lam * n0, 4 * n0 * eps * sin_sum],
                       [0.0, 2 * (gamma + lam * n0)]])
    F_minus = np.array([[2 * gamma, -4 * n0 * chi * sg],
                        [delta / n0, 0.0]])
    D_plus = np.array([[4 * n0 * gamma, -2 * eps * sin_sum],
                       [-2 * eps * sin_sum, -gamma / n0]])

    gl = gamma + lam * n0
    C_plus = np.array([
        [4 * n0 * (gamma * gl + ch**2), -2 * lam * n0 * ch * sg],
        [-2 * lam * n0 * ch * sg, -lam * gamma],
    ]) / (4 * lam * n0 * gl)
    C_minus = np.array([
        [4 * n0 * chi * ch, 2 * chi * gamma * sg],
        [2 * chi * gamma * sg, (gamma**2 - ad * ch) / n0],
    ]) / (4 * ad * chi)
    D_minus = 2 * F_minus @ C_minus

    return AboveThresholdMatrices(
        F_plus=F_plus, F_minus=F_minus, D_plus=D_plus, D_minus=D_minus,
        C_plus=C_plus, C_minus=C_minus, n0=n0, sin_phase_sum=sin_sum,
        near_threshold=near_threshold(scales, eps))


def temporal_corr_above(params: SystemParams, scales: DerivedScales,
                        eps: float, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Two-time covariances of the (+) and (-) pairs at lag ``tau``.

    ``tau = 0`` reproduces ``(C_plus, C_minus)`` exactly.
    """
    mats = above_matrices(params, scales, eps)
    out = []
    for F, C in ((mats.F_plus, mats.C_plus), (mats.F_minus, mats.C_minus)):
        if tau >= 0:
            out.append(expm(-F * tau) @ C)
        else:
            out.append(C @ expm(-F.T * abs(tau)))
    return out[0], out[1]
