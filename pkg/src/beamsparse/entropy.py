"""Shannon-entropy sparsity measure and its diagonal quadratic majorizer.

For a unit-power weight vector the per-element powers p_n = |w_n|^2 form a
probability vector, and the regularizer is the Shannon entropy

    f(w) = -sum_n p_n log p_n        (natural log)

which is 0 when all power sits on one element and log N when power is
uniform, so minimizing it concentrates power on few elements. Since f is
concave in p, it is bounded above by its tangent plane at any anchor point;
on the sphere the tangent takes the quadratic form

    f(w) <= w^H diag(grad) w + const,

with grad_n = -log p_n - 1 evaluated at the anchor powers. The solver
refreshes this bound once per iteration and minimizes it in place of f.
Powers below ``POWER_FLOOR`` are clamped inside the log so the bound stays
finite when elements are driven to exact zero; such entries contribute
nothing to the entropy value itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import WeightVector, _readonly
from .errors import ContractError

#: Clamp floor for log arguments; keeps gradients finite at zero power.
POWER_FLOOR = 1e-12

_UNIT_POWER_TOL = 1e-9


def _unit_powers(w: WeightVector) -> np.ndarray:
    p = w.powers()
    if abs(float(p.sum()) - 1.0) > _UNIT_POWER_TOL:
        raise ContractError(f"weights must have unit total power, got {float(p.sum())!r}")
    return p


def _plogp_sum(p: np.ndarray) -> float:
    # entries below the floor contribute zero (the 0*log 0 convention)
    safe = np.where(p >= POWER_FLOOR, p, 1.0)
    return float((safe * np.log(safe)).sum())


def entropy(w: WeightVector) -> float:
    """Shannon entropy of the element-power distribution, in [0, log N]."""
    return -_plogp_sum(_unit_powers(w))


def entropy_gradient(p: np.ndarray) -> np.ndarray:
    """Gradient of -sum p log p, elementwise -log(max(p, floor)) - 1."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ContractError("powers must be nonnegative")
    return -np.log(np.maximum(p, POWER_FLOOR)) - 1.0


@dataclass(frozen=True, eq=False)
class MajorizerDiag:
    """Tangent upper bound of the entropy at an anchor point.

    The bound evaluates as sum_n diag[n] * |w_n|^2 + constant; it touches the
    entropy at the anchor and lies above it everywhere else on the sphere.
    """

    diag: np.ndarray
    constant: float

    def __post_init__(self):
        object.__setattr__(self, "diag", _readonly(np.asarray(self.diag, dtype=float)))


def majorizer_diag(w_anchor: WeightVector) -> MajorizerDiag:
    """Build the tangent bound of the entropy at the anchor weights."""
    p = _unit_powers(w_anchor)
    grad = entropy_gradient(p)
    value = -_plogp_sum(p)
    return MajorizerDiag(grad, value - float(grad @ p))


def majorizer_value(w: WeightVector, m: MajorizerDiag) -> float:
    """Evaluate the tangent bound at unit-power weights w."""
    return float(m.diag @ _unit_powers(w)) + m.constant
