"""Random-restart Nelder-Mead search for ensembles that extremize a bound.

Ensembles are parameterized without constraints: ``k - 1`` logits (the last
one is pinned at 0) give the probabilities through a softmax, and ``2 * k * n``
reals give the real and imaginary parts of the ``k`` amplitude vectors, which
are normalized. The search maximizes a score; for ``negative_rate_bound`` the
score is minus the rate bound, but reported objective values are always the
bound itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .ensembles import PureEnsemble, make_ensemble
from .measures import UNDEFINED, certified_rate_interval, gap_upper_bound, theorem_rate_bound
from .sampling import rng_stream

OBJECTIVES = ("rate_bound", "gap_upper", "certified_low", "negative_rate_bound")

#: Edge length of the axis-aligned initial simplex around each start point.
SIMPLEX_STEP = 0.25

#: Evaluations per restart; the budget is split over ``ceil(budget / RESTART_SIZE)`` restarts.
RESTART_SIZE = 500


def objective_value(objective: str, ens: PureEnsemble) -> float:
    """Objective in natural units; ``-inf`` (or ``+inf`` when minimizing) where undefined."""
    if objective in ("rate_bound", "negative_rate_bound"):
        value = theorem_rate_bound(ens)
    elif objective == "gap_upper":
        value = gap_upper_bound(ens)
    elif objective == "certified_low":
        interval = certified_rate_interval(ens)
        value = interval[0] if isinstance(interval, tuple) else UNDEFINED
    else:
        raise ValueError(f"unknown objective {objective!r}")
    if value == UNDEFINED:
        return math.inf if objective == "negative_rate_bound" else -math.inf
    return float(value)


def _score(objective: str, value: float) -> float:
    return -value if objective == "negative_rate_bound" else value


def n_params(dim_a: int, dim_b: int, num_states: int) -> int:
    return num_states - 1 + 2 * num_states * dim_a * dim_b


def decode(x, dim_a: int, dim_b: int, num_states: int) -> PureEnsemble | None:
    """Map an unconstrained parameter vector to an ensemble (``None`` if degenerate)."""
    x = np.asarray(x, dtype=float)
    k = num_states
    logits = np.append(x[: k - 1], 0.0)
    w = np.exp(logits - logits.max())
    probs = w / w.sum()
    raw = x[k - 1:].reshape(k, dim_a * dim_b, 2)
    amps = raw[..., 0] + 1j * raw[..., 1]
    norms = np.linalg.norm(amps, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        return None
    return make_ensemble((dim_a, dim_b), probs, amps / norms[:, None])


@dataclass(frozen=True)
class SearchResult:
    best_ensemble: PureEnsemble
    best_objective: float
    objective: str
    evaluations: int
    seed: int
    trace: tuple  # (evaluation index, best objective so far), one entry per improvement

    @property
    def maximize(self) -> bool:
        return self.objective != "negative_rate_bound"


class _BudgetExhausted(Exception):
    pass


def search(objective: str, dims, num_states: int, budget: int, seed: int) -> SearchResult:
    """Best ensemble found within ``budget`` objective evaluations.

    Each restart starts from a standard-normal parameter vector drawn from its
    own seeded substream, so with ``budget=1`` the result is that initial point.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    dim_a, dim_b = (int(d) for d in dims)
    if objective == "certified_low" and (dim_a, dim_b) != (2, 2):
        raise ValueError("certified_low is only available for dims (2, 2)")
    if num_states < 1:
        raise ValueError("num_states must be >= 1")

    n_restarts = math.ceil(budget / RESTART_SIZE)
    shares = [budget // n_restarts + (r < budget % n_restarts) for r in range(n_restarts)]
    dim = n_params(dim_a, dim_b, num_states)

    best = {"score": -math.inf, "value": None, "x": None}
    trace = []
    count = 0

    for r, share in enumerate(shares):
        rng = rng_stream(seed, r)
        x0 = rng.standard_normal(dim)
        used = 0

        def f(x):
            nonlocal count, used
            if used >= share:
                raise _BudgetExhausted
            used += 1
            count += 1
            ens = decode(x, dim_a, dim_b, num_states)
            value = objective_value(objective, ens) if ens is not None else (
                math.inf if objective == "negative_rate_bound" else -math.inf)
            score = _score(objective, value)
            if score > best["score"] or best["x"] is None:
                best.update(score=score, value=value, x=np.array(x, copy=True))
                trace.append((count, value))
            # Nelder-Mead minimizes; keep it finite so the simplex stays well-defined.
            return -score if math.isfinite(score) else 1e6

        simplex = np.vstack([x0, x0 + SIMPLEX_STEP * np.eye(dim)])
        try:
            minimize(
                f,
                x0,
                method="Nelder-Mead",
                options={"maxfev": share, "maxiter": 10 * share, "xatol": 1e-12,
                         "fatol": 1e-14, "initial_simplex": simplex},
            )
        except _BudgetExhausted:
            pass

    ens = decode(best["x"], dim_a, dim_b, num_states)
    return SearchResult(ens, best["value"], objective, count, seed, tuple(trace))
