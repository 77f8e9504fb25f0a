"""
Closed-form generalization bounds for margin classifiers.

Every evaluator takes a ``BoundInputs`` and returns the right-hand side of
the bound on L_D(w) with its unspecified absolute constant exposed as
``inputs.c``. Logs are natural; ln(e/x) is evaluated as 1 - ln(x), and
x ln(e/x) is 0 at x = 0.
"""

import math
from typing import Callable, Dict, Mapping, Optional

from domain.errors import PreconditionError
from domain.value_objects.bound_inputs import BoundInputs, BoundKind

# Slack on gamma^2 n >= 1 so that gamma = n^(-1/2) computed in floats is admitted.
SCALED_N_TOLERANCE = 1e-12


def log_e_over(x: float) -> float:
    """ln(e / x) for x in (0, 1]."""
    return 1.0 - math.log(x)


def entropy_term(x: float) -> float:
    """x ln(e / x), continuous at 0."""
    return 0.0 if x == 0.0 else x * log_e_over(x)


def bartlett_hard(b: BoundInputs) -> float:
    """Hard-margin bound c (ln^2 n / (gamma^2 n) + ln(e/delta) / n)."""
    if b.empirical_loss != 0.0:
        raise PreconditionError(
            "bartlett_hard", f"requires zero empirical margin loss, got {b.empirical_loss!r}"
        )
    log_n = math.log(b.n)
    return b.c * (log_n * log_n / b.scaled_n + log_e_over(b.delta) / b.n)


def bartlett_soft(b: BoundInputs, rademacher: bool = False) -> float:
    """
    Soft-margin bound L + c sqrt(ln^2 n / (gamma^2 n) + ln(e/delta) / n).

    With ``rademacher`` the ln^2 n factor is replaced by 1.
    """
    log_n = math.log(b.n)
    complexity = 1.0 if rademacher else log_n * log_n
    return b.empirical_loss + b.c * math.sqrt(complexity / b.scaled_n + log_e_over(b.delta) / b.n)


def mcallester(b: BoundInputs) -> float:
    L = b.empirical_loss
    log_n = math.log(b.n)
    return L + b.c * (
        math.sqrt(L * log_n / b.scaled_n)
        + log_n / b.scaled_n
        + math.sqrt((log_n + log_e_over(b.delta)) / b.n)
    )


def sota(b: BoundInputs) -> float:
    L = b.empirical_loss
    log_n = math.log(b.n)
    first_order = log_n / b.scaled_n + log_e_over(b.delta) / b.n
    return L + b.c * (math.sqrt(L * first_order) + first_order)


def tight(b: BoundInputs) -> float:
    """
    L + c (sqrt(L (ln(e/L) / (gamma^2 n) + ln(e/delta) / n))
           + ln(e gamma^2 n) / (gamma^2 n) + ln(e/delta) / n).

    Valid for n^(-1/2) <= gamma <= 1.
    """
    if b.scaled_n < 1.0 - SCALED_N_TOLERANCE:
        raise PreconditionError("tight", f"gamma >= n^(-1/2) required, gamma^2 n = {b.scaled_n!r}")
    L = b.empirical_loss
    tail = log_e_over(b.delta) / b.n
    radical = math.sqrt(entropy_term(L) / b.scaled_n + L * tail)
    # gamma^2 n may sit a hair below 1 inside the tolerance
    scaled_n = max(b.scaled_n, 1.0)
    return L + b.c * (radical + (1.0 + math.log(scaled_n)) / scaled_n + tail)


def lower(b: BoundInputs, tau: Optional[float] = None, range_constant: float = 1.0) -> float:
    """
    c (sqrt(tau ln(e/tau) / (gamma^2 n)) + ln(gamma^2 n) / (gamma^2 n)).

    Two constants are kept apart: ``range_constant`` gates the admissible gamma interval
    range_constant n^(-1/2) < gamma < 1 / range_constant and ``b.c`` scales
    the value; both only need to be positive. ``tau`` defaults to the empirical loss.
    """
    tau = b.empirical_loss if tau is None else tau
    if not 0.0 <= tau <= 1.0:
        raise PreconditionError("lower", f"tau={tau!r} outside [0, 1]")
    if range_constant <= 0.0:
        raise PreconditionError("lower", f"range_constant={range_constant!r} must be positive")
    low = range_constant / math.sqrt(b.n)
    high = 1.0 / range_constant
    if not low < b.gamma < high:
        raise PreconditionError(
            "lower", f"gamma={b.gamma!r} outside ({low!r}, {high!r})"
        )
    return b.c * (math.sqrt(entropy_term(tau) / b.scaled_n) + math.log(b.scaled_n) / b.scaled_n)


_EVALUATORS: Dict[BoundKind, Callable[..., float]] = {
    BoundKind.BARTLETT_HARD: bartlett_hard,
    BoundKind.BARTLETT_SOFT: bartlett_soft,
    BoundKind.MCALLESTER: mcallester,
    BoundKind.SOTA: sota,
    BoundKind.TIGHT: tight,
    BoundKind.LOWER: lower,
}


def evaluate(
    kind: BoundKind,
    b: BoundInputs,
    tau: Optional[float] = None,
    rademacher: bool = False,
    range_constant: float = 1.0,
) -> float:
    """Evaluate one bound; options apply only to the bound that understands them."""
    if kind is BoundKind.BARTLETT_SOFT:
        return bartlett_soft(b, rademacher=rademacher)
    if kind is BoundKind.LOWER:
        return lower(b, tau=tau, range_constant=range_constant)
    return _EVALUATORS[kind](b)


def evaluate_all(
    b: BoundInputs,
    constants: Optional[Mapping[BoundKind, float]] = None,
    tau: Optional[float] = None,
    rademacher: bool = False,
    range_constant: float = 1.0,
) -> Dict[BoundKind, Optional[float]]:
    """
    All six bounds at one parameter point, in ``BoundKind`` order.

    ``constants`` overrides ``b.c`` per bound. A bound whose precondition
    fails at this point maps to None.
    """
    constants = constants or {}
    row: Dict[BoundKind, Optional[float]] = {}
    for kind in BoundKind:
        inputs = b.with_changes(c=constants[kind]) if kind in constants else b
        try:
            row[kind] = evaluate(kind, inputs, tau, rademacher, range_constant)
        except PreconditionError:
            row[kind] = None
    return row


def tightness_gap(empirical_loss: float, n: float) -> float:
    """sqrt(ln n / ln(e/L)): the factor between the first-order terms of sota and tight."""
    if not 0.0 < empirical_loss <= 1.0:
        raise PreconditionError("tightness_gap", f"L={empirical_loss!r} outside (0, 1]")
    if n < 1.0:
        raise PreconditionError("tightness_gap", f"n={n!r} must be at least 1")
    return math.sqrt(math.log(n) / log_e_over(empirical_loss))
