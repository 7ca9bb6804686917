"""Seeded random ensembles, batch sweeps, and the invariant verification harness.

Randomness comes from per-trial PCG64 substreams derived from the master seed
and the trial index via :class:`numpy.random.SeedSequence`, so trials can run
in any order or in parallel and still reproduce bit for bit.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .ensembles import PureEnsemble, PureState, average_state, make_ensemble, multicopy_ensemble
from .errors import DimensionOverflow, MulticopyTooLarge
from .measures import (
    EnsembleReport,
    Violation,
    analyze,
    entropy_of_entanglement,
    source_entanglement,
    von_neumann_entropy,
)

ADDITIVITY_TOL = 1e-8
PURE_MARGINAL_TOL = 1e-8


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` (e.g. a trial index) under ``seed``."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class SampleConfig:
    dim_a: int
    dim_b: int
    num_states: int
    trials: int
    seed: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1 or self.num_states < 1:
            raise ValueError("dimensions and number of states must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if (self.dim_a * self.dim_b) ** 2 > linalg.ELEMENT_CAP:
            raise DimensionOverflow("dimension overflow")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def haar_random_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> PureState:
    """Unitarily invariant random pure state (normalized complex Gaussian vector)."""
    n = dim_a * dim_b
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(z / np.linalg.norm(z), dim_a, dim_b)


def random_ensemble(cfg: SampleConfig, rng: np.random.Generator) -> PureEnsemble:
    """``num_states`` Haar states with flat-Dirichlet probabilities."""
    return random_ensemble_for(cfg.dim_a, cfg.dim_b, cfg.num_states, rng)


def random_ensemble_for(dim_a: int, dim_b: int, num_states: int, rng) -> PureEnsemble:
    e = rng.standard_exponential(num_states)
    probs = e / e.sum()
    states = [haar_random_state(dim_a, dim_b, rng).amps for _ in range(num_states)]
    return make_ensemble((dim_a, dim_b), probs, states)


@dataclass(frozen=True)
class TrialResult:
    seed: int
    trial: int
    ensemble: PureEnsemble
    report: EnsembleReport


def run_trial(cfg: SampleConfig, trial: int, diagnostics=(), flip=()) -> TrialResult:
    ens = random_ensemble(cfg, rng_stream(cfg.seed, trial))
    report = analyze(ens, diagnostics, strict=False, flip=flip)
    return TrialResult(cfg.seed, trial, ens, report)


def sweep(cfg: SampleConfig, diagnostics=(), *, workers: int = 1, flip=()) -> list[TrialResult]:
    """Analyze ``cfg.trials`` random ensembles; results are ordered by trial index.

    Invariant violations are recorded on each report rather than raised.
    """
    def one(t):
        return run_trial(cfg, t, diagnostics, flip)

    if workers <= 1:
        return [one(t) for t in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(cfg.trials)))


@dataclass(frozen=True)
class AdditivityReport:
    n_copies: int
    pair_max_error: float
    entropy_error: float
    source_error: float
    multicopy_e_source: float
    multicopy_entropy: float

    @property
    def passed(self) -> bool:
        return max(self.pair_max_error, self.entropy_error, self.source_error) <= ADDITIVITY_TOL


def additivity_check(ens: PureEnsemble, n_copies: int) -> AdditivityReport:
    """Compare N-copy quantities with N times their single-copy values.

    Checks pairwise product states, the entropy of ``rho^{⊗N}`` and the source
    entanglement of the N-copy ensemble, all across the regrouped A^N : B^N cut.
    """
    if n_copies not in (2, 3):
        raise ValueError(f"additivity_check supports N in {{2, 3}}, got {n_copies}")
    big = multicopy_ensemble(ens, n_copies)
    dim_a, dim_b = ens.dims
    e = [entropy_of_entanglement(psi) for _, psi in ens]

    pair_err = 0.0
    for i, j in itertools.product(range(len(ens)), repeat=2):
        vec = linalg.regroup_vector(np.kron(ens.states[i], ens.states[j]), dim_a, dim_b, 2)
        joint = entropy_of_entanglement(PureState(vec, dim_a**2, dim_b**2))
        pair_err = max(pair_err, abs(joint - e[i] - e[j]))

    rho = average_state(ens)
    rho_n = rho
    for _ in range(n_copies - 1):
        rho_n = linalg.tensor_product(rho_n, rho)
    rho_n = linalg.regroup_operator(rho_n, dim_a, dim_b, n_copies)
    s_n = von_neumann_entropy(rho_n)
    s_1 = von_neumann_entropy(rho)

    e_big = source_entanglement(big)
    e_one = float(np.dot(ens.probs, e))
    return AdditivityReport(
        n_copies,
        pair_err,
        abs(s_n - n_copies * s_1),
        abs(e_big - n_copies * e_one),
        e_big,
        s_n,
    )


VERIFY_INVARIANTS = (
    "mixing_sandwich",
    "concavity_bound",
    "gap_identity",
    "rate_range",
    "araki_lieb",
    "certified_order",
    "pure_marginals",
    "additivity",
)


@dataclass(frozen=True)
class Failure:
    seed: int
    trial: int
    invariant: str
    values: dict


@dataclass
class VerifySummary:
    trials: int
    seed: int
    passes: dict = field(default_factory=lambda: {k: 0 for k in VERIFY_INVARIANTS})
    skipped: dict = field(default_factory=lambda: {k: 0 for k in VERIFY_INVARIANTS})
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _pure_marginal_violation(ens: PureEnsemble, flip) -> Violation | None:
    worst = 0.0
    for _, psi in ens:
        e = entropy_of_entanglement(psi)
        rho = psi.projector()
        s_a = von_neumann_entropy(linalg.partial_trace(rho, psi.dim_a, psi.dim_b, "A"))
        s_b = von_neumann_entropy(linalg.partial_trace(rho, psi.dim_a, psi.dim_b, "B"))
        worst = max(worst, abs(e - s_a), abs(e - s_b))
    ok = worst <= PURE_MARGINAL_TOL
    if ok == ("pure_marginals" in flip):
        return Violation("pure_marginals", {"max_error": worst})
    return None


def verify_trial(seed: int, trial: int, max_dim: int, max_states: int, multicopy_n: int, flip=()):
    """Run every invariant on one random trial.

    Returns ``(ensemble, violations, checked)`` where ``checked`` names the
    invariants that actually ran.
    """
    rng = rng_stream(seed, trial)
    dim_a = int(rng.integers(1, max_dim + 1))
    dim_b = int(rng.integers(1, max_dim + 1))
    k = int(rng.integers(1, max_states + 1))
    ens = random_ensemble_for(dim_a, dim_b, k, rng)
    diagnostics = ("eof",) if ens.dims == (2, 2) else ()
    report = analyze(ens, diagnostics, strict=False, flip=flip)
    violations = list(report.violations)
    checked = [
        "mixing_sandwich", "concavity_bound", "gap_identity", "rate_range", "araki_lieb",
        "pure_marginals",
    ]
    if "certified_rate_interval" in report.diagnostics and isinstance(
        report.diagnostics["certified_rate_interval"], tuple
    ):
        checked.append("certified_order")
    v = _pure_marginal_violation(ens, set(flip))
    if v:
        violations.append(v)
    if multicopy_n >= 2:
        try:
            add = additivity_check(ens, multicopy_n)
        except (MulticopyTooLarge, DimensionOverflow):
            pass
        else:
            checked.append("additivity")
            if add.passed == ("additivity" in flip):
                violations.append(Violation("additivity", {
                    "n_copies": multicopy_n,
                    "pair_max_error": add.pair_max_error,
                    "entropy_error": add.entropy_error,
                    "source_error": add.source_error,
                }))
    return ens, violations, checked


def verify(trials: int, seed: int, max_dim: int = 4, *, max_states: int = 6,
           multicopy_n: int = 0, flip=()) -> VerifySummary:
    """Random invariant sweep over dims in ``1..max_dim`` and ``1..max_states`` states."""
    if trials < 1 or max_dim < 1 or max_states < 1:
        raise ValueError("trials, max_dim and max_states must be positive")
    if multicopy_n not in (0, 1, 2, 3):
        raise ValueError("multicopy_n must be 0 (off), 2 or 3")
    summary = VerifySummary(trials, seed)
    for t in range(trials):
        _, violations, checked = verify_trial(seed, t, max_dim, max_states, multicopy_n, flip)
        failed = {v.invariant for v in violations}
        for name in VERIFY_INVARIANTS:
            if name not in checked:
                summary.skipped[name] += 1
            elif name not in failed:
                summary.passes[name] += 1
        summary.failures.extend(Failure(seed, t, v.invariant, v.values) for v in violations)
    return summary
