"""Born-rule ensembles: outcome statistics over random infinitesimal Re p0.

Each trial draws epsilon from its own substream SeedSequence([seed, trial]),
so counts do not depend on the number of workers or on chunking.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import binomtest

from collapsar.collapse.solution import analytic_p, classify_outcome
from collapsar.core.constants import (
    BINOMIAL_CONFIDENCE,
    DEFAULT_PROBE_PHASE,
    VERIFY_TIME_IN_TAU,
)
from collapsar.core.errors import ConfigError, SingularityError
from collapsar.core.types import CollapseParams, InitialState, Outcome, PhysicalConstants

logger = logging.getLogger(__name__)


class EpsilonDistribution(Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    POINT = "point"  # every epsilon exactly zero


@dataclass(frozen=True)
class EnsembleConfig:
    """Trial count, epsilon distribution and seed of one ensemble.

    mirror negates every sampled epsilon; verify_every runs the closed-form
    end-state check on every verify_every-th trial.
    """

    n_trials: int
    epsilon_scale: float
    distribution: EpsilonDistribution = EpsilonDistribution.UNIFORM
    seed: int = 0
    probe_phase: float = DEFAULT_PROBE_PHASE
    mirror: bool = False
    verify_every: int = 100
    workers: int = 1
    confidence: float = BINOMIAL_CONFIDENCE

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be >= 1, got {self.n_trials}")
        if not self.epsilon_scale > 0:
            raise ConfigError(f"epsilon_scale must be positive, got {self.epsilon_scale}")
        if not -0.5 < self.probe_phase < 0.5:
            raise ConfigError(f"probe_phase must lie in (-0.5, 0.5), got {self.probe_phase}")
        if self.verify_every < 1 or self.workers < 1:
            raise ConfigError("verify_every and workers must be >= 1")
        if not 0 < self.confidence < 1:
            raise ConfigError(f"confidence must lie in (0, 1), got {self.confidence}")


@dataclass(frozen=True)
class EnsembleResult:
    n_trials: int
    n_plus: int
    n_minus: int
    n_undetermined: int
    fraction_plus: float
    binomial_ci: tuple[float, float]
    confidence: float
    n_verified: int
    n_verified_agree: int

    @property
    def verification_rate(self) -> float:
        return self.n_verified_agree / self.n_verified if self.n_verified else 1.0


def sample_epsilon(cfg: EnsembleConfig, trial: int) -> float:
    """Deterministic epsilon of one trial."""
    if cfg.distribution is EpsilonDistribution.POINT:
        return 0.0
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial]))
    if cfg.distribution is EpsilonDistribution.UNIFORM:
        eps = float(rng.uniform(-cfg.epsilon_scale, cfg.epsilon_scale))
    else:
        eps = float(rng.normal(0.0, cfg.epsilon_scale))
    return -eps if cfg.mirror else eps


def probe_momentum(cfg: EnsembleConfig, params: CollapseParams, eps: float) -> complex:
    """p0 = eps + i q tan(k x_probe), with k x_probe = pi * probe_phase."""
    return complex(eps, params.q * math.tan(math.pi * cfg.probe_phase))


def _verify(p0: complex, outcome: Outcome, params: CollapseParams) -> bool:
    """Does the closed-form end state at 20 tau_c agree with the classification?"""
    t_check = VERIFY_TIME_IN_TAU * params.tau_c_nominal
    try:
        p, _ = analytic_p(p0, t_check, params)
    except SingularityError:
        return outcome is Outcome.UNDETERMINED
    if outcome is Outcome.UNDETERMINED:
        return False
    return int(np.sign(p.real)) == outcome.sign


def _run_chunk(
    args: tuple[EnsembleConfig, CollapseParams, int, int],
) -> tuple[np.ndarray, int, int]:
    cfg, params, start, stop = args
    signs = np.empty(stop - start, dtype=np.int8)
    verified = agree = 0
    for i, trial in enumerate(range(start, stop)):
        p0 = probe_momentum(cfg, params, sample_epsilon(cfg, trial))
        outcome = classify_outcome(p0)
        signs[i] = outcome.sign
        if trial % cfg.verify_every == 0:
            verified += 1
            agree += int(_verify(p0, outcome, params))
    return signs, verified, agree


def _chunks(n_trials: int, workers: int) -> list[tuple[int, int]]:
    size = math.ceil(n_trials / (4 * workers))
    return [(s, min(s + size, n_trials)) for s in range(0, n_trials, size)]


def born_ensemble(
    cfg: EnsembleConfig,
    params: CollapseParams,
    state: InitialState,
    constants: PhysicalConstants = PhysicalConstants(),
) -> EnsembleResult:
    """Classify n_trials perturbed symmetric states and tally the outcomes.

    The probe sits at x = pi * probe_phase / k; only the phase k x enters p0.
    params.q must equal the state's hbar*k.
    """
    if not math.isclose(params.q, state.q(constants), rel_tol=1e-12):
        raise ConfigError(
            f"Collapse momentum q={params.q} does not match hbar*k={state.q(constants)} of the state"
        )
    logger.debug("Probe point x=%.6g", math.pi * cfg.probe_phase / state.k)
    tasks = [(cfg, params, a, b) for a, b in _chunks(cfg.n_trials, cfg.workers)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_chunk, tasks))
    else:
        results = [_run_chunk(t) for t in tasks]

    signs = np.concatenate([r[0] for r in results])
    n_plus = int(np.count_nonzero(signs == 1))
    n_minus = int(np.count_nonzero(signs == -1))
    n_undetermined = cfg.n_trials - n_plus - n_minus
    n_verified = sum(r[1] for r in results)
    n_agree = sum(r[2] for r in results)

    ci = binomtest(n_plus, cfg.n_trials).proportion_ci(
        confidence_level=cfg.confidence, method="exact"
    )
    result = EnsembleResult(
        n_trials=cfg.n_trials,
        n_plus=n_plus,
        n_minus=n_minus,
        n_undetermined=n_undetermined,
        fraction_plus=n_plus / cfg.n_trials,
        binomial_ci=(float(ci.low), float(ci.high)),
        confidence=cfg.confidence,
        n_verified=n_verified,
        n_verified_agree=n_agree,
    )
    logger.info(
        "Born ensemble: %d plus / %d minus / %d undetermined (fraction_plus=%.4f, %d/%d verified)",
        n_plus,
        n_minus,
        n_undetermined,
        result.fraction_plus,
        n_agree,
        n_verified,
    )
    return result
