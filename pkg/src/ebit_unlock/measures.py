"""Entropies, entanglement quantities and unlocking-rate bounds.

All logarithms are base 2, so entropies are in bits and entanglement in ebits.
For a pure-state source ``{p_i, |psi_i>}`` with average state ``rho``:

* ``E_source = sum_i p_i E(psi_i)`` is the entanglement available with labels;
* ``min(S_A, S_B)`` bounds it from above (concavity of the entropy);
* the hashing values ``S_A - S_AB`` and ``S_B - S_AB`` bound the distillable
  entanglement of ``rho`` from below;
* their difference gives ``gap_upper = S_AB - |S_A - S_B|`` ebits per copy, and
  ``1 - |S_A - S_B| / S_AB`` bounds the ebits unlocked per classical bit.

Degenerate cases are reported in-band with the :data:`UNDEFINED` and
:data:`UNAVAILABLE` flags instead of numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from . import linalg
from .ensembles import PureEnsemble, PureState, average_state
from .errors import InvariantViolation, NotADistribution, NotHermitian, ShapeError, TwoQubitOnly

UNDEFINED = "undefined"
UNAVAILABLE = "unavailable"

TOL = 1e-9
IDENTITY_TOL = 1e-12
#: Label entropies at or below this make every rate quantity undefined.
H_ZERO = 1e-12
#: Average-state entropies at or below this are treated as zero.
S_ZERO = 1e-9

DIAGNOSTICS = ("lognegativity", "eof")

Rate = Union[float, str]

_SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    h = float(-np.sum(p * np.log2(p)))
    return h + 0.0 if h > 0 else 0.0


def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < 0) or abs(float(np.sum(p)) - 1.0) > TOL:
        raise NotADistribution("not a distribution")
    return _entropy_bits(p)


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits of a density matrix.

    Eigenvalues in ``[-1e-9, 0)`` are clamped to zero; more negative ones raise
    :class:`~ebit_unlock.errors.NotPSD`.
    """
    rho = linalg.as_matrix(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > linalg.TRACE_TOL:
        raise ShapeError(f"shape error: trace {tr!r} is not 1")
    return _entropy_bits(linalg.clamp_spectrum(linalg.hermitian_eigenvalues(rho)))


def entropy_of_entanglement(psi: PureState) -> float:
    return _entropy_bits(linalg.schmidt_probs(psi.amps, psi.dim_a, psi.dim_b))


def source_entanglement(ens: PureEnsemble) -> float:
    """Average entanglement of the labelled states, ``sum_i p_i E(psi_i)``."""
    values = [entropy_of_entanglement(psi) for _, psi in ens]
    return float(np.dot(ens.probs, values))


class Entropies(NamedTuple):
    s_a: float
    s_b: float
    s_ab: float


def average_entropies(ens: PureEnsemble) -> Entropies:
    rho = average_state(ens)
    dim_a, dim_b = ens.dims
    return Entropies(
        von_neumann_entropy(linalg.partial_trace(rho, dim_a, dim_b, keep="A")),
        von_neumann_entropy(linalg.partial_trace(rho, dim_a, dim_b, keep="B")),
        von_neumann_entropy(rho),
    )


def concavity_upper_bound(ens: PureEnsemble) -> float:
    s = average_entropies(ens)
    return min(s.s_a, s.s_b)


class HashingBound(NamedTuple):
    a_to_b: float
    b_to_a: float
    max: float
    floored: float


def hashing_lower_bound(rho, dim_a: int, dim_b: int) -> HashingBound:
    """One-way hashing values ``S_A - S_AB`` and ``S_B - S_AB``.

    Raw values may be negative; ``floored`` is ``max(0, max)``.
    """
    rho = linalg.as_matrix(rho)
    s_ab = von_neumann_entropy(rho)
    a_to_b = von_neumann_entropy(linalg.partial_trace(rho, dim_a, dim_b, "A")) - s_ab
    b_to_a = von_neumann_entropy(linalg.partial_trace(rho, dim_a, dim_b, "B")) - s_ab
    best = max(a_to_b, b_to_a)
    return HashingBound(a_to_b, b_to_a, best, max(0.0, best))


def _gap(s: Entropies) -> float:
    return s.s_ab - abs(s.s_a - s.s_b)


def gap_upper_bound(ens: PureEnsemble) -> float:
    """Upper bound ``S_AB - |S_A - S_B|`` on the ebits per copy that labels can add."""
    return _gap(average_entropies(ens))


def _rate(s: Entropies, h_labels: float) -> Rate:
    if h_labels <= H_ZERO:
        return UNDEFINED
    if s.s_ab <= S_ZERO:
        # All states coincide up to phase; nothing can be unlocked.
        return 0.0
    gap = _gap(s)
    raw = gap / s.s_ab
    if gap < -TOL:
        # Leave it out of range so the violation stays visible.
        return raw
    return min(1.0, max(0.0, raw))


def theorem_rate_bound(ens: PureEnsemble) -> Rate:
    """Upper bound ``1 - |S_A - S_B| / S_AB`` on ebits unlocked per classical bit.

    Returns :data:`UNDEFINED` when the label distribution carries no entropy and
    ``0.0`` when the average state is pure.
    """
    return _rate(average_entropies(ens), shannon_entropy(ens.probs))


def log_negativity(rho, dim_a: int, dim_b: int) -> float:
    pt = linalg.partial_transpose(rho, dim_a, dim_b)
    trace_norm = float(np.sum(np.abs(linalg.hermitian_eigenvalues(pt))))
    return max(0.0, float(np.log2(trace_norm)))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = linalg.as_matrix(rho)
    if rho.shape != (4, 4):
        raise TwoQubitOnly(f"two-qubit only: got a {rho.shape[0]}-dimensional state")
    if np.max(np.abs(rho - rho.conj().T)) > linalg.HERMITIAN_TOL:
        raise NotHermitian("not Hermitian")
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(linalg.clamp_spectrum(w))) @ v.conj().T
    flipped = _SIGMA_YY @ rho.conj() @ _SIGMA_YY
    m = sqrt_rho @ flipped @ sqrt_rho
    lam = np.sqrt(np.clip(linalg.hermitian_eigenvalues(m), 0.0, None))
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    x = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c)))
    return _entropy_bits(np.array([x, 1.0 - x]))


def eof_two_qubit(rho) -> float:
    """Entanglement of formation of a two-qubit state, in ebits."""
    return eof_from_concurrence(concurrence(rho))


def _certified(e_source, eof, hashing_floor, rate, h_labels):
    if h_labels <= H_ZERO or rate == UNDEFINED:
        return UNDEFINED
    low = max(0.0, e_source - eof) / h_labels
    high = min(rate, max((e_source - hashing_floor) / h_labels, low))
    return (low, high)


def certified_rate_interval(ens: PureEnsemble):
    """Interval known to contain the unlocking rate, for two-qubit sources only.

    The lower end uses the entanglement of formation of the average state as an
    upper bound on its regularized entanglement; the upper end uses the floored
    hashing bound and :func:`theorem_rate_bound`. Returns :data:`UNAVAILABLE`
    unless both dimensions are 2 and :data:`UNDEFINED` when the labels carry
    no entropy.
    """
    if ens.dims != (2, 2):
        return UNAVAILABLE
    h_labels = shannon_entropy(ens.probs)
    if h_labels <= H_ZERO:
        return UNDEFINED
    rho = average_state(ens)
    return _certified(
        source_entanglement(ens),
        eof_two_qubit(rho),
        hashing_lower_bound(rho, 2, 2).floored,
        theorem_rate_bound(ens),
        h_labels,
    )


@dataclass(frozen=True)
class Violation:
    invariant: str
    values: dict


@dataclass(frozen=True)
class EnsembleReport:
    s_a: float
    s_b: float
    s_ab: float
    h_labels: float
    e_source: float
    concavity_upper: float
    hashing_a_to_b: float
    hashing_b_to_a: float
    hashing_max: float
    hashing_max_floored: float
    gap_upper: float
    rate_bound: Rate
    diagnostics: dict = field(default_factory=dict)
    violations: tuple = ()

    def to_dict(self) -> dict:
        d = {
            "S_A": self.s_a,
            "S_B": self.s_b,
            "S_AB": self.s_ab,
            "H_labels": self.h_labels,
            "E_source": self.e_source,
            "concavity_upper": self.concavity_upper,
            "hashing_AtoB": self.hashing_a_to_b,
            "hashing_BtoA": self.hashing_b_to_a,
            "hashing_max": self.hashing_max,
            "hashing_max_floored": self.hashing_max_floored,
            "gap_upper": self.gap_upper,
            "rate_bound": self.rate_bound,
        }
        diag = {}
        for k, v in self.diagnostics.items():
            diag[k] = list(v) if isinstance(v, tuple) else v
        d["diagnostics"] = diag
        d["violations"] = [{"invariant": v.invariant, "values": v.values} for v in self.violations]
        return d


INVARIANTS = (
    "mixing_sandwich",
    "concavity_bound",
    "gap_identity",
    "rate_range",
    "araki_lieb",
    "certified_order",
)


def check_report(report: EnsembleReport, flip=()) -> list[Violation]:
    """Return every violated report invariant.

    ``flip`` names invariants whose test is deliberately inverted; it exists
    only to exercise failure handling in the verification harness.
    """
    r = report
    checks = {
        "mixing_sandwich": (
            -TOL <= r.s_ab <= r.h_labels + TOL,
            {"S_AB": r.s_ab, "H_labels": r.h_labels},
        ),
        "concavity_bound": (
            r.e_source <= r.concavity_upper + TOL,
            {"E_source": r.e_source, "concavity_upper": r.concavity_upper},
        ),
        "gap_identity": (
            abs(min(r.s_a, r.s_b) - (max(r.s_a, r.s_b) - r.s_ab) - r.gap_upper) <= IDENTITY_TOL,
            {"S_A": r.s_a, "S_B": r.s_b, "S_AB": r.s_ab, "gap_upper": r.gap_upper},
        ),
        "rate_range": (
            r.rate_bound == UNDEFINED or 0.0 <= r.rate_bound <= 1.0,
            {"rate_bound": r.rate_bound},
        ),
        "araki_lieb": (r.gap_upper >= -TOL, {"gap_upper": r.gap_upper}),
    }
    interval = r.diagnostics.get("certified_rate_interval")
    if isinstance(interval, tuple):
        checks["certified_order"] = (
            interval[0] <= interval[1] + TOL,
            {"low": interval[0], "high": interval[1]},
        )
    flip = set(flip)
    return [
        Violation(name, values)
        for name, (ok, values) in checks.items()
        if ok == (name in flip)
    ]


def analyze(ens: PureEnsemble, diagnostics=(), *, strict: bool = True, flip=()) -> EnsembleReport:
    """Compute every entropy, bound and requested diagnostic for ``ens``.

    ``diagnostics`` may contain ``"lognegativity"`` and ``"eof"``; the latter adds
    the two-qubit entanglement of formation and the certified rate interval.
    With ``strict`` a failed invariant raises
    :class:`~ebit_unlock.errors.InvariantViolation`; otherwise violations are
    recorded on the report.
    """
    unknown = set(diagnostics) - set(DIAGNOSTICS)
    if unknown:
        raise ValueError(f"unknown diagnostics {sorted(unknown)}")
    dim_a, dim_b = ens.dims
    rho = average_state(ens)
    rho_a = linalg.partial_trace(rho, dim_a, dim_b, "A")
    rho_b = linalg.partial_trace(rho, dim_a, dim_b, "B")
    s = Entropies(von_neumann_entropy(rho_a), von_neumann_entropy(rho_b), von_neumann_entropy(rho))
    h_labels = shannon_entropy(ens.probs)
    e_source = source_entanglement(ens)
    a_to_b = s.s_a - s.s_ab
    b_to_a = s.s_b - s.s_ab
    hashing_max = max(a_to_b, b_to_a)
    rate = _rate(s, h_labels)

    diag = {}
    if "lognegativity" in diagnostics:
        diag["log_negativity"] = log_negativity(rho, dim_a, dim_b)
    if "eof" in diagnostics:
        if ens.dims == (2, 2):
            eof = eof_two_qubit(rho)
            diag["eof_two_qubit"] = eof
            diag["certified_rate_interval"] = _certified(
                e_source, eof, max(0.0, hashing_max), rate, h_labels
            )
        else:
            diag["eof_two_qubit"] = UNAVAILABLE
            diag["certified_rate_interval"] = UNAVAILABLE

    report = EnsembleReport(
        s_a=s.s_a,
        s_b=s.s_b,
        s_ab=s.s_ab,
        h_labels=h_labels,
        e_source=e_source,
        concavity_upper=min(s.s_a, s.s_b),
        hashing_a_to_b=a_to_b,
        hashing_b_to_a=b_to_a,
        hashing_max=hashing_max,
        hashing_max_floored=max(0.0, hashing_max),
        gap_upper=_gap(s),
        rate_bound=rate,
        diagnostics=diag,
    )
    violations = check_report(report, flip=flip)
    if violations and strict:
        raise InvariantViolation(violations)
    return replace(report, violations=tuple(violations))
