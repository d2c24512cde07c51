"""Positive-P Monte Carlo integrator for the full nonlinear stochastic model.

Trajectories live in the doubled phase space ``(alpha1, alpha2, beta1,
beta2)`` of independent complex amplitudes; normal-ordered operator
moments equal stochastic averages of the corresponding ``beta``/``alpha``
products.  The integrator is explicit Ito Euler-Maruyama with the
pairwise noise factorization

    R1 = sqrt(c/2) (xi1 + i xi2),  R2 = sqrt(c/2) (xi1 - i xi2),
    c  = eps - lam * alpha1 * alpha2,

(and an analogous independent pair for the beta variables), which realizes
the two nonzero noise correlators of the model with four real Gaussians
per step.  The complex square root takes the principal branch; any fixed
branch gives the same second moments.

Divergent trajectories (a known feature of positive-P sampling) are
frozen at the divergence bound, excluded from every average and counted;
estimates abort when more than :data:`MAX_DISCARD_FRACTION` of the
ensemble is lost.

Determinism: trajectory noise comes from counter-based Philox streams
keyed by ``(seed, chunk_index)`` where chunks have the fixed size
``SimConfig.chunk_size``; the reduction over chunks runs in index order,
so results are bitwise reproducible for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .dynamics import adiabatic_pump, drift_field  # re-exported  # noqa: F401
from .errors import EstimationError, ParameterDomainError
from .params import DerivedScales, SystemParams

#: estimates abort when the diverged-trajectory fraction exceeds this
MAX_DISCARD_FRACTION = 0.01

#: exponent tuples (alpha1, alpha2, beta1, beta2) for common observables
MOMENT_ALIASES: dict[str, tuple[int, int, int, int]] = {
    "a1": (1, 0, 0, 0), "a2": (0, 1, 0, 0), "b1": (0, 0, 1, 0), "b2": (0, 0, 0, 1),
    "n1": (1, 0, 1, 0), "n2": (0, 1, 0, 1),
    "b1a1": (1, 0, 1, 0), "b2a2": (0, 1, 0, 1),
    "a1a2": (1, 1, 0, 0), "b1b2": (0, 0, 1, 1),
    "a1sq": (2, 0, 0, 0), "a2sq": (0, 2, 0, 0),
    "b1a2": (0, 1, 1, 0), "b2a1": (1, 0, 0, 1),
}


@dataclass(frozen=True)
class SimConfig:
    """Integration and ensemble settings.

    ``chunk_size`` is part of the noise-stream layout: trajectory ``i``
    draws from the Philox stream keyed by ``(seed, i // chunk_size)``, so
    changing it changes the realization (not the statistics).
    """

    dt: float = 1e-3
    t_max: float = 30.0
    n_traj: int = 1000
    burn_in: float = 10.0
    seed: int = 0
    divergence_bound: float = 1e6
    scheme: str = "euler-ito"
    sample_every: int = 10
    chunk_size: int = 512

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ParameterDomainError("dt must be positive")
        if self.n_traj < 2:
            raise ParameterDomainError("n_traj must be at least 2")
        if self.divergence_bound <= 0:
            raise ParameterDomainError("divergence_bound must be positive")
        if self.scheme != "euler-ito":
            raise ParameterDomainError(f"unknown integration scheme {self.scheme!r}")
        if self.sample_every < 1 or self.chunk_size < 1:
            raise ParameterDomainError("sample_every and chunk_size must be >= 1")


@dataclass(frozen=True)
class TrajectoryState:
    """Snapshot of one trajectory in the doubled phase space."""

    alpha1: complex
    alpha2: complex
    beta1: complex
    beta2: complex
    t: float
    diverged: bool


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled history of a single trajectory."""

    times: np.ndarray
    states: np.ndarray  # (n_samples, 4) complex
    diverged: bool

    @property
    def final_state(self) -> TrajectoryState:
        a1, a2, b1, b2 = self.states[-1]
        return TrajectoryState(a1, a2, b1, b2, float(self.times[-1]), self.diverged)


@dataclass(frozen=True)
class EnsembleEstimate:
    """Steady-state estimate of one stochastic moment.

    ``std_error`` comes from the scatter of per-trajectory time averages
    (never from step-level scatter): for a complex mean it is
    ``sqrt(var(re) + var(im)) / sqrt(n_effective)``.
    """

    label: str
    mean: complex
    std_error: float
    n_effective: int
    discard_fraction: float


def parse_moment_spec(spec) -> tuple[int, int, int, int]:
    """Normalize a moment spec: alias string or 4-tuple of exponents."""
    if isinstance(spec, str):
        try:
            return MOMENT_ALIASES[spec]
        except KeyError:
            raise ParameterDomainError(
                f"unknown moment alias {spec!r}; known: {sorted(MOMENT_ALIASES)}") from None
    tup = tuple(int(p) for p in spec)
    if len(tup) != 4 or any(p < 0 for p in tup):
        raise ParameterDomainError(f"moment spec must be 4 non-negative exponents, got {spec!r}")
    return tup  # type: ignore[return-value]


def moment_label(spec: tuple[int, int, int, int]) -> str:
    names = ("a1", "a2", "b1", "b2")
    parts = [f"{n}^{p}" if p > 1 else n for n, p in zip(names, spec) if p > 0]
    return "*".join(parts) if parts else "1"


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(chunk_index)])
    return np.random.Generator(np.random.Philox(key=key))


def noise_increment(state: np.ndarray, params: SystemParams, scales: DerivedScales,
                    dt: float, rng: np.random.Generator) -> np.ndarray:
    """One Euler step's stochastic increment for ``(alpha1, alpha2, beta1, beta2)``.

    Sample statistics realize ``<dW1 dW2> = (eps - lam*alpha1*alpha2) dt``
    and ``<dW1+ dW2+> = (eps - lam*beta1*beta2) dt`` with all other second
    moments zero; a complex correlator coefficient is legitimate here.
    """
    if dt <= 0:
        raise ParameterDomainError("dt must be positive")
    state = np.asarray(state, dtype=complex)
    a1, a2, b1, b2 = state
    c = scales.eps - scales.lam * a1 * a2
    cb = scales.eps - scales.lam * b1 * b2
    xi = rng.standard_normal((4,) + np.shape(a1))
    sc = np.sqrt(np.asarray(c / 2, dtype=complex))
    scb = np.sqrt(np.asarray(cb / 2, dtype=complex))
    inc = np.stack([
        sc * (xi[0] + 1j * xi[1]),
        sc * (xi[0] - 1j * xi[1]),
        scb * (xi[2] + 1j * xi[3]),
        scb * (xi[2] - 1j * xi[3]),
    ])
    return inc * math.sqrt(dt)


def _advance(state: np.ndarray, alive: np.ndarray, params: SystemParams,
             scales: DerivedScales, config: SimConfig, rng: np.random.Generator,
             noiseless: bool) -> tuple[np.ndarray, np.ndarray]:
    """One Euler-Maruyama step; diverged trajectories stay frozen."""
    inc = drift_field(state, params, scales) * config.dt
    if not noiseless:
        inc = inc + noise_increment(state, params, scales, config.dt, rng)
    new = state + inc * alive
    with np.errstate(invalid="ignore"):
        bad = ~(np.abs(new).max(axis=0) <= config.divergence_bound)
    alive = alive & ~bad
    return np.where(alive, new, state), alive


def _sample_steps(config: SimConfig) -> tuple[int, list[int]]:
    n_steps = int(round(config.t_max / config.dt))
    burn_steps = int(math.ceil(config.burn_in / config.dt))
    samples = [k for k in range(1, n_steps + 1)
               if k > burn_steps and k % config.sample_every == 0]
    return n_steps, samples


_PHASE_BINS = 181
_FOLD_STEP = 0.01


def _fold_edges() -> np.ndarray:
    inner = np.arange(0.0, math.pi / 2, _FOLD_STEP)
    return np.append(inner, math.pi / 2)


def _chunk_worker(args):
    (params, scales, config, chunk_index, width, specs, noiseless,
     want_phase, x0) = args
    rng = _chunk_rng(config.seed, chunk_index)
    state = np.zeros((4, width), dtype=complex)
    if x0 is not None:
        state += np.asarray(x0, dtype=complex).reshape(4, 1)
    alive = np.ones(width, dtype=bool)
    n_steps, sample_at = _sample_steps(config)
    sample_set = set(sample_at)

    sums = np.zeros((len(specs), width), dtype=complex)
    counts = np.zeros(width, dtype=np.int64)
    if want_phase:
        edges = np.linspace(-math.pi, math.pi, _PHASE_BINS + 1)
        fold_edges = _fold_edges()
        hist_diff = np.zeros(_PHASE_BINS, dtype=np.int64)
        hist_sum = np.zeros(_PHASE_BINS, dtype=np.int64)
        hist_mode1 = np.zeros(_PHASE_BINS, dtype=np.int64)
        hist_fold = np.zeros(len(fold_edges) - 1, dtype=np.int64)

    for k in range(1, n_steps + 1):
        state, alive = _advance(state, alive, params, scales, config, rng, noiseless)
        if k not in sample_set:
            continue
        counts += alive
        for j, spec in enumerate(specs):
            prod = np.ones(width, dtype=complex)
            for row, p in enumerate(spec):
                if p:
                    prod = prod * state[row] ** p
            sums[j] += np.where(alive, prod, 0)
        if want_phase:
            ph1 = np.angle(state[0, alive])
            ph2 = np.angle(state[1, alive])
            diff = np.angle(np.exp(1j * (ph2 - ph1)))
            tot = np.angle(np.exp(1j * (ph2 + ph1)))
            hist_diff += np.histogram(diff, bins=edges)[0]
            hist_sum += np.histogram(tot, bins=edges)[0]
            hist_mode1 += np.histogram(ph1, bins=edges)[0]
            dmod = np.mod(diff, math.pi)
            folded = np.minimum(dmod, math.pi - dmod)
            hist_fold += np.histogram(folded, bins=fold_edges)[0]

    out = {"chunk": chunk_index, "alive": alive, "sums": sums, "counts": counts}
    if want_phase:
        out.update(hist_diff=hist_diff, hist_sum=hist_sum,
                   hist_mode1=hist_mode1, hist_fold=hist_fold)
    return out


def _run_chunks(params, scales, config, specs, n_workers, noiseless,
                want_phase, x0=None):
    cs = config.chunk_size
    n_chunks = (config.n_traj + cs - 1) // cs
    widths = [min(cs, config.n_traj - i * cs) for i in range(n_chunks)]
    jobs = [(params, scales, config, i, widths[i], specs, noiseless, want_phase, x0)
            for i in range(n_chunks)]
    if n_workers > 1 and n_chunks > 1:
        with get_context("fork").Pool(min(n_workers, n_chunks)) as pool:
            results = pool.map(_chunk_worker, jobs)
    else:
        results = [_chunk_worker(job) for job in jobs]
    return sorted(results, key=lambda r: r["chunk"])


def ensemble_moments(params: SystemParams, scales: DerivedScales, config: SimConfig,
                     moment_specs, n_workers: int = 1,
                     noiseless: bool = False) -> list[EnsembleEstimate]:
    """Trajectory-parallel steady-state estimates of stochastic moments.

    Each spec is an exponent tuple over ``(alpha1, alpha2, beta1, beta2)``
    or an alias from :data:`MOMENT_ALIASES`.  Averages run over sample
    times after ``burn_in`` and over never-diverged trajectories.

    Raises
    ------
    EstimationError
        When every trajectory diverged, when the discard fraction exceeds
        :data:`MAX_DISCARD_FRACTION`, or when the schedule leaves no
        samples.
    """
    specs = [parse_moment_spec(s) for s in moment_specs]
    _, sample_at = _sample_steps(config)
    if not sample_at:
        raise EstimationError("no sample times: t_max must exceed burn_in")
    results = _run_chunks(params, scales, config, specs, n_workers, noiseless, False)

    alive = np.concatenate([r["alive"] for r in results])
    sums = np.concatenate([r["sums"] for r in results], axis=1)
    counts = np.concatenate([r["counts"] for r in results])
    discard = 1.0 - alive.mean()
    if not alive.any():
        raise EstimationError("all trajectories diverged")
    if discard > MAX_DISCARD_FRACTION:
        raise EstimationError(
            f"discard fraction {discard:.4f} exceeds {MAX_DISCARD_FRACTION:.2%}; "
            "estimate aborted (reduce dt or pump, or raise divergence_bound)")

    estimates = []
    n_eff = int(alive.sum())
    for j, spec in enumerate(specs):
        per_traj = sums[j, alive] / counts[alive]
        mean = complex(per_traj.mean())
        scatter = math.sqrt(per_traj.real.var(ddof=1) + per_traj.imag.var(ddof=1))
        estimates.append(EnsembleEstimate(
            label=moment_label(spec), mean=mean,
            std_error=scatter / math.sqrt(n_eff),
            n_effective=n_eff, discard_fraction=float(discard)))
    return estimates


@dataclass(frozen=True)
class PhaseHistogram:
    """Histograms of the subharmonic phase difference and sum.

    ``counts_diff``/``counts_sum`` bin ``arg(alpha2) -+ arg(alpha1)`` over
    ``(-pi, pi]`` and ``counts_mode1`` bins the absolute phase of mode 1
    (which populates two clusters pi apart above threshold, the two-fold
    phase-space symmetry).  ``folded_counts`` bin the distance of the phase
    difference from 0 modulo pi (range ``[0, pi/2]``), which is the
    locking diagnostic: above threshold the distribution concentrates at
    the semiclassical values, whose two-fold multiplicity makes "0 mod pi"
    the locked target for either detuning sign.
    """

    edges: np.ndarray
    counts_diff: np.ndarray
    counts_sum: np.ndarray
    counts_mode1: np.ndarray
    folded_edges: np.ndarray
    folded_counts: np.ndarray
    n_samples: int
    discard_fraction: float
    note: str = ""

    def locked_fraction(self, halfwidth: float = 0.3) -> float:
        """Mass of the phase difference within ``halfwidth`` of 0 (mod pi)."""
        total = self.folded_counts.sum()
        if total == 0:
            return math.nan
        inside = self.folded_counts[self.folded_edges[1:] <= halfwidth + 1e-12]
        return float(inside.sum() / total)


def phase_histogram(params: SystemParams, scales: DerivedScales, config: SimConfig,
                    n_workers: int = 1) -> PhaseHistogram:
    """Steady-state histograms of the phase difference and phase sum."""
    _, sample_at = _sample_steps(config)
    if not sample_at:
        raise EstimationError("no sample times: t_max must exceed burn_in")
    results = _run_chunks(params, scales, config, [], n_workers, False, True)
    alive = np.concatenate([r["alive"] for r in results])
    if not alive.any():
        raise EstimationError("all trajectories diverged")
    hist_diff = sum(r["hist_diff"] for r in results)
    hist_sum = sum(r["hist_sum"] for r in results)
    hist_mode1 = sum(r["hist_mode1"] for r in results)
    hist_fold = sum(r["hist_fold"] for r in results)
    note = ""
    if scales.eps <= scales.eps_th:
        note = "below threshold: phases undefined at zero amplitude"
    return PhaseHistogram(
        edges=np.linspace(-math.pi, math.pi, _PHASE_BINS + 1),
        counts_diff=hist_diff, counts_sum=hist_sum, counts_mode1=hist_mode1,
        folded_edges=_fold_edges(), folded_counts=hist_fold,
        n_samples=int(hist_diff.sum()),
        discard_fraction=float(1.0 - alive.mean()), note=note)


def integrate_trajectory(params: SystemParams, scales: DerivedScales,
                         config: SimConfig, rng_stream: np.random.Generator | None = None,
                         x0: np.ndarray | None = None,
                         noiseless: bool = False) -> TrajectoryRecord:
    """Integrate a single trajectory, recording every ``sample_every`` steps.

    Divergence freezes the state and marks the record; it is data, not an
    error.  ``rng_stream`` defaults to the stream of trajectory index 0.
    """
    rng = rng_stream if rng_stream is not None else _chunk_rng(config.seed, 0)
    state = np.zeros((4, 1), dtype=complex)
    if x0 is not None:
        state[:, 0] = np.asarray(x0, dtype=complex)
    alive = np.ones(1, dtype=bool)
    n_steps = int(round(config.t_max / config.dt))
    times = [0.0]
    states = [state[:, 0].copy()]
    for k in range(1, n_steps + 1):
        state, alive = _advance(state, alive, params, scales, config, rng, noiseless)
        if k % config.sample_every == 0 or k == n_steps:
            times.append(k * config.dt)
            states.append(state[:, 0].copy())
    return TrajectoryRecord(times=np.array(times), states=np.array(states),
                            diverged=bool(~alive[0]))
