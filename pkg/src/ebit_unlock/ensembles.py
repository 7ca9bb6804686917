"""Pure-state sources: validation, JSON files, and N-copy expansion.

An ensemble file looks like::

    {"dims": [2, 2],
     "states": [{"p": 0.5, "amps": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]},
                ...]}

Amplitudes use the composite index ``a * dim_b + b``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import MulticopyTooLarge, ShapeError, ValidationError

NORM_TOL = 1e-9
PROB_TOL = 1e-9

#: Largest number of N-copy outcomes :func:`multicopy` will enumerate.
MULTICOPY_CAP = 4096

_FILE_KEYS = {"dims", "states"}
_STATE_KEYS = {"p", "amps"}


def _frozen(a) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector on a ``dim_a x dim_b`` system."""

    amps: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if self.dim_a < 1 or self.dim_b < 1:
            raise ShapeError(f"shape error: dims ({self.dim_a}, {self.dim_b})")
        if amps.shape != (self.dim_a * self.dim_b,):
            raise ShapeError(
                f"shape error: amplitude vector of shape {amps.shape} "
                f"for dims ({self.dim_a}, {self.dim_b})"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError([f"state not normalized (norm {norm!r})"])
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def projector(self) -> np.ndarray:
        return linalg.projector(self.amps)


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    """A validated i.i.d. source ``{p_i, |psi_i>}``.

    ``states`` has shape ``(k, dim_a * dim_b)``. Use :func:`validate` or
    :func:`make_ensemble` rather than the constructor.
    """

    dim_a: int
    dim_b: int
    probs: np.ndarray
    states: np.ndarray
    dropped: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(np.asarray(self.probs, dtype=float)))
        object.__setattr__(self, "states", _frozen(np.asarray(self.states, dtype=complex)))

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def state(self, i: int) -> PureState:
        return PureState(self.states[i], self.dim_a, self.dim_b)

    def __iter__(self):
        for i in range(len(self)):
            yield float(self.probs[i]), self.state(i)


@dataclass(frozen=True)
class MulticopyOutcome:
    indices: tuple[int, ...]
    prob: float
    state: PureState


def make_ensemble(dims, probs, states) -> PureEnsemble:
    """Validate an ensemble given as numeric arrays.

    ``states`` is any sequence of complex amplitude vectors.
    """
    dim_a, dim_b = (int(d) for d in dims)
    probs = np.asarray(probs, dtype=float).reshape(-1)
    states = [np.asarray(s, dtype=complex).reshape(-1) for s in states]
    problems = []
    if dim_a < 1 or dim_b < 1:
        raise ValidationError([f"shape error: dims must be positive, got ({dim_a}, {dim_b})"])
    if len(probs) == 0:
        problems.append("shape error: ensemble has no entries")
    if len(probs) != len(states):
        problems.append(f"shape error: {len(probs)} probabilities for {len(states)} states")
    if np.any(probs < 0):
        problems.append("probabilities not normalized (negative probability)")
    total = float(np.sum(probs))
    if len(probs) and abs(total - 1.0) > PROB_TOL:
        problems.append(f"probabilities not normalized (sum {total!r})")
    n = dim_a * dim_b
    for i, s in enumerate(states):
        if s.shape != (n,):
            problems.append(f"shape error: state {i} has {s.size} amplitudes, expected {n}")
            continue
        norm = float(np.linalg.norm(s))
        if abs(norm - 1.0) > NORM_TOL:
            problems.append(f"state not normalized: state {i} has norm {norm!r}")
    if problems:
        raise ValidationError(problems)
    keep = probs > 0
    return PureEnsemble(
        dim_a,
        dim_b,
        probs[keep],
        np.array(states)[keep],
        dropped=int(np.count_nonzero(~keep)),
    )


def _parse_amp(x):
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise ValueError


def validate(raw) -> PureEnsemble:
    """Parse and validate a raw ensemble description (the decoded JSON object).

    Raises :class:`ValidationError` listing every problem found.
    """
    if not isinstance(raw, dict):
        raise ValidationError(["shape error: ensemble must be a JSON object"])
    problems = []
    unknown = sorted(set(raw) - _FILE_KEYS)
    if unknown:
        problems.append(f"shape error: unknown top-level keys {unknown}")
    missing = sorted(_FILE_KEYS - set(raw))
    if missing:
        problems.append(f"shape error: missing keys {missing}")
        raise ValidationError(problems)
    dims = raw["dims"]
    if (
        not isinstance(dims, (list, tuple))
        or len(dims) != 2
        or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)
    ):
        problems.append(f"shape error: dims must be two positive integers, got {dims!r}")
        raise ValidationError(problems)
    entries = raw["states"]
    if not isinstance(entries, list):
        problems.append("shape error: 'states' must be an array")
        raise ValidationError(problems)
    probs, states = [], []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or set(entry) != _STATE_KEYS:
            problems.append(f"shape error: state entry {i} must have exactly keys 'p' and 'amps'")
            continue
        try:
            p = float(entry["p"])
            amps = [_parse_amp(x) for x in entry["amps"]]
        except (TypeError, ValueError):
            problems.append(f"shape error: state entry {i} is not numeric [re, im] data")
            continue
        probs.append(p)
        states.append(np.array(amps, dtype=complex))
    if problems:
        raise ValidationError(problems)
    return make_ensemble(dims, probs, states)


def to_dict(ens: PureEnsemble) -> dict:
    return {
        "dims": [ens.dim_a, ens.dim_b],
        "states": [
            {"p": float(p), "amps": [[float(z.real), float(z.imag)] for z in amps]}
            for p, amps in zip(ens.probs, ens.states)
        ],
    }


def dumps(ens: PureEnsemble) -> str:
    # json writes floats with repr, so the round trip is exact.
    return json.dumps(to_dict(ens), indent=1)


def loads(text: str) -> PureEnsemble:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([f"shape error: invalid JSON ({exc})"]) from exc
    return validate(raw)


def load(path) -> PureEnsemble:
    return loads(Path(path).read_text())


def save(ens: PureEnsemble, path) -> None:
    Path(path).write_text(dumps(ens) + "\n")


def average_state(ens: PureEnsemble) -> np.ndarray:
    """``sum_i p_i |psi_i><psi_i|``."""
    s = ens.states
    return np.einsum("i,ij,ik->jk", ens.probs, s, s.conj())


def _check_multicopy(ens: PureEnsemble, n_copies: int, cap: int) -> None:
    if n_copies < 1:
        raise ValueError(f"number of copies must be >= 1, got {n_copies}")
    outcomes = len(ens) ** n_copies
    if outcomes > cap:
        raise MulticopyTooLarge(f"multicopy too large: {outcomes} outcomes exceeds cap {cap}")
    dim = (ens.dim_a * ens.dim_b) ** n_copies
    if dim * dim > linalg.ELEMENT_CAP:
        raise MulticopyTooLarge(
            f"multicopy too large: dimension {dim} exceeds element cap {linalg.ELEMENT_CAP}"
        )


def multicopy(ens: PureEnsemble, n_copies: int, *, cap: int = MULTICOPY_CAP) -> list[MulticopyOutcome]:
    """All ``k**N`` outcomes of N uses of the source, A factors grouped first."""
    _check_multicopy(ens, n_copies, cap)
    dim_a, dim_b = ens.dims
    out = []
    for idx in itertools.product(range(len(ens)), repeat=n_copies):
        vec = ens.states[idx[0]]
        prob = float(ens.probs[idx[0]])
        for i in idx[1:]:
            vec = np.kron(vec, ens.states[i])
            prob *= float(ens.probs[i])
        vec = linalg.regroup_vector(vec, dim_a, dim_b, n_copies)
        out.append(MulticopyOutcome(idx, prob, PureState(vec, dim_a**n_copies, dim_b**n_copies)))
    return out


def multicopy_ensemble(ens: PureEnsemble, n_copies: int, *, cap: int = MULTICOPY_CAP) -> PureEnsemble:
    outcomes = multicopy(ens, n_copies, cap=cap)
    return PureEnsemble(
        ens.dim_a**n_copies,
        ens.dim_b**n_copies,
        np.array([o.prob for o in outcomes]),
        np.array([o.state.amps for o in outcomes]),
    )
