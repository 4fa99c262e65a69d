"""Joint beampattern matching and sparse element selection solver.

The problem is

    minimize  lam * sum_k (P_k(w) - alpha * d_k)^2 + f(w)
    over      unit-norm complex weights w and real template scale alpha,

where P_k(w) = |a_k^H w|^2 is the transmit pattern on the angle grid, d is
the desired template and f is the Shannon-entropy sparsity measure. The
quartic coupling in w is split with an auxiliary copy v of w (constraint
w = v, scaled dual u), and each sweep performs, in order:

1. closed-form least-squares refresh of the template scale alpha;
2. an exact solve of the v block (unconstrained complex least squares);
3. a refresh of the diagonal entropy majorizer at the current weights;
4. an exact solve of the majorized w block followed by projection back
   onto the unit sphere;
5. dual ascent on u.

The sweep repeats until the weight change drops below ``eta`` or the
iteration budget runs out. Both block systems are Hermitian positive
definite (the w system needs rho > 2 because the majorizer diagonal is
bounded below by -1 on the sphere) and are solved by dense Cholesky
factorizations; the N x N matrices are accumulated from rank-1 steering
products without ever materializing per-angle outer-product matrices.

A single solve is a sequential state machine; concurrent solves share no
mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .arrays import SteeringSet, WeightVector, beampattern, project_unit_sphere
from .entropy import MajorizerDiag, entropy, majorizer_diag, majorizer_value
from .errors import ContractError, DegenerateInputError, DivergenceError, NumericalError
from .metrics import matching_error_db
from .templates import DesiredPattern


@dataclass(frozen=True)
class SolverParams:
    """Solver hyperparameters.

    lam weighs the matching term against the entropy term; rho is the
    consensus penalty and must exceed 2 so the w-block system stays positive
    definite; eta is the stop tolerance on the weight change; seed drives
    the random initialization.
    """

    lam: float = 0.1
    rho: float = 30.0
    eta: float = 1e-8
    max_iters: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ContractError(f"lam must be nonnegative, got {self.lam}")
        if not self.rho > 2.0:
            raise ContractError(f"rho must exceed 2, got {self.rho}")
        if not self.eta > 0:
            raise ContractError(f"eta must be positive, got {self.eta}")
        if self.max_iters < 0:
            raise ContractError(f"max_iters must be nonnegative, got {self.max_iters}")


@dataclass(frozen=True, eq=False)
class AdmmState:
    """One iterate: scale alpha, auxiliary v, unit-norm weights w, scaled dual u."""

    alpha: float
    v: np.ndarray
    w: WeightVector
    u: np.ndarray
    iter: int = 0


@dataclass(frozen=True)
class IterationRecord:
    """Per-iteration trace row."""

    iter: int
    objective: float
    lagrangian: float
    primal_residual: float
    alpha: float
    matching_error_db: float
    w_change: float


def _as_vector(x, n: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (n,):
        raise ContractError(f"{name} must be a complex vector of length {n}, got shape {x.shape}")
    return x


def _steer_products(steering: SteeringSet, x: np.ndarray) -> np.ndarray:
    """a_k^H x for every grid angle."""
    return steering.vectors.conj() @ x


def inner_products(steering: SteeringSet, w, v) -> np.ndarray:
    """Bilinear pattern samples r_k = w^H a_k a_k^H v for every grid angle."""
    n = steering.n_elements
    w = _as_vector(w, n, "w")
    v = _as_vector(v, n, "v")
    return np.conj(_steer_products(steering, w)) * _steer_products(steering, v)


def update_alpha(r: np.ndarray, d: DesiredPattern) -> float:
    """Least-squares template scale: argmin over real alpha of sum |r_k - alpha d_k|^2."""
    r = np.asarray(r)
    if r.shape != d.values.shape:
        raise ContractError("inner products and template sizes differ")
    denom = float(d.values @ d.values)
    if not denom > 0.0:
        raise DegenerateInputError("template is all zero; alpha is undefined")
    return float(d.values @ np.real(r)) / denom


def data_fit_gram(steering: SteeringSet, x: np.ndarray, lam: float) -> np.ndarray:
    """lam * sum_k |a_k^H x|^2 a_k a_k^H, the data-fit Hessian of both blocks."""
    weights = np.abs(_steer_products(steering, x)) ** 2
    a = steering.vectors
    return lam * ((a.T * weights) @ a.conj())


def template_match_rhs(
    steering: SteeringSet, x: np.ndarray, alpha: float, d: DesiredPattern, lam: float
) -> np.ndarray:
    """lam * alpha * sum_k d_k (a_k^H x) a_k, the data-fit right-hand side."""
    c = _steer_products(steering, x)
    return lam * alpha * (steering.vectors.T @ (d.values * c))


def _solve_hpd(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a Hermitian positive definite system by Cholesky factorization."""
    try:
        factor = scipy.linalg.cho_factor(matrix, lower=False, check_finite=False)
        solution = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"positive definite factorization failed: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise NumericalError("linear solve produced non-finite entries")
    return solution


def update_v(
    steering: SteeringSet,
    w,
    u,
    alpha: float,
    d: DesiredPattern,
    params: SolverParams,
) -> np.ndarray:
    """Exact minimizer of the v block (matching term plus consensus penalty)."""
    n = steering.n_elements
    w = _as_vector(w, n, "w")
    u = _as_vector(u, n, "u")
    matrix = data_fit_gram(steering, w, params.lam)
    matrix[np.diag_indices(n)] += params.rho / 2.0
    rhs = template_match_rhs(steering, w, alpha, d, params.lam) + (params.rho / 2.0) * (w + u)
    return _solve_hpd(matrix, rhs)


def solve_weight_system(
    steering: SteeringSet,
    v,
    u,
    alpha: float,
    d: DesiredPattern,
    m: MajorizerDiag,
    params: SolverParams,
) -> np.ndarray:
    """Pre-projection solution of the majorized w block."""
    n = steering.n_elements
    v = _as_vector(v, n, "v")
    u = _as_vector(u, n, "u")
    matrix = data_fit_gram(steering, v, params.lam)
    matrix[np.diag_indices(n)] += m.diag + params.rho / 2.0
    rhs = template_match_rhs(steering, v, alpha, d, params.lam) + (params.rho / 2.0) * (v - u)
    return _solve_hpd(matrix, rhs)


def update_w(
    steering: SteeringSet,
    v,
    u,
    alpha: float,
    d: DesiredPattern,
    m: MajorizerDiag,
    params: SolverParams,
) -> WeightVector:
    """Majorized w block: exact unconstrained solve, then sphere projection."""
    w_hat = solve_weight_system(steering, v, u, alpha, d, m, params)
    return WeightVector(project_unit_sphere(w_hat), normalized=True)


def update_dual(u, w, v) -> np.ndarray:
    """Dual ascent on the consensus constraint: u + (w - v)."""
    u = np.asarray(u, dtype=complex)
    w = np.asarray(w, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if not u.shape == w.shape == v.shape:
        raise ContractError("u, w, v must share one shape")
    return u + (w - v)


def objective_value(
    steering: SteeringSet,
    w: WeightVector,
    alpha: float,
    d: DesiredPattern,
    params: SolverParams,
) -> float:
    """Value of the joint objective at (w, alpha)."""
    residual = beampattern(steering, w) - alpha * d.values
    return params.lam * float(residual @ residual) + entropy(w)


def augmented_lagrangian(
    state: AdmmState,
    steering: SteeringSet,
    d: DesiredPattern,
    params: SolverParams,
    majorizer: Optional[MajorizerDiag] = None,
) -> float:
    """Scaled-dual augmented Lagrangian at the given state.

    Uses the true entropy term; pass ``majorizer`` to evaluate the surrogate
    bound instead (useful for checking that the majorized sweep objective
    dominates the exact one).
    """
    r = inner_products(steering, state.w.values, state.v)
    residual = r - state.alpha * d.values
    phi = float(np.real(np.vdot(residual, residual)))
    sparsity = entropy(state.w) if majorizer is None else majorizer_value(state.w, majorizer)
    gap = state.w.values - state.v + state.u
    penalty = (params.rho / 2.0) * float(np.real(np.vdot(gap, gap)))
    return params.lam * phi + sparsity + penalty


def initial_state(steering: SteeringSet, params: SolverParams) -> AdmmState:
    """Random start: v and w drawn i.i.d. complex Gaussian then unit-normalized."""
    rng = np.random.default_rng(params.seed)
    n = steering.n_elements

    def draw() -> np.ndarray:
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return project_unit_sphere(z)

    v0 = draw()
    w0 = draw()
    return AdmmState(alpha=1.0, v=v0, w=WeightVector(w0, normalized=True), u=np.zeros(n, complex))


def _record(
    steering: SteeringSet,
    d: DesiredPattern,
    params: SolverParams,
    state: AdmmState,
    w_change: float,
) -> IterationRecord:
    pattern = beampattern(steering, state.w)
    return IterationRecord(
        iter=state.iter,
        objective=objective_value(steering, state.w, state.alpha, d, params),
        lagrangian=augmented_lagrangian(state, steering, d, params),
        primal_residual=float(np.linalg.norm(state.w.values - state.v)),
        alpha=float(state.alpha),
        matching_error_db=matching_error_db(pattern, state.alpha, d),
        w_change=float(w_change),
    )


def _state_is_finite(state: AdmmState) -> bool:
    return (
        np.isfinite(state.alpha)
        and bool(np.all(np.isfinite(state.v)))
        and bool(np.all(np.isfinite(state.w.values)))
        and bool(np.all(np.isfinite(state.u)))
    )


def solve(
    steering: SteeringSet,
    d: DesiredPattern,
    params: SolverParams,
    init: Optional[AdmmState] = None,
    observer: Optional[Callable[[AdmmState], None]] = None,
) -> tuple[WeightVector, float, list[IterationRecord]]:
    """Run the full solver loop.

    Returns the final unit-norm weights, the final template scale, and the
    iteration trace (row 0 is the initial state). ``observer``, when given,
    is called with every newly accepted state.

    Raises
    ------
    DivergenceError
        If any iterate turns non-finite; the exception carries the trace
        collected so far.
    """
    if d.count != steering.n_angles:
        raise ContractError("template length does not match the angle grid")
    if not float(d.values @ d.values) > 0.0:
        raise DegenerateInputError("template is all zero")

    state = init if init is not None else initial_state(steering, params)
    if state.w.n_elements != steering.n_elements:
        raise ContractError("initial state does not match the array size")
    if not _state_is_finite(state):
        raise ContractError("initial state contains non-finite values")

    trace = [_record(steering, d, params, state, w_change=0.0)]
    for _ in range(params.max_iters):
        try:
            r = inner_products(steering, state.w.values, state.v)
            alpha = update_alpha(r, d)
            v = update_v(steering, state.w.values, state.u, alpha, d, params)
            m = majorizer_diag(state.w)
            w = update_w(steering, v, state.u, alpha, d, m, params)
            u = update_dual(state.u, w.values, v)
        except (NumericalError, DegenerateInputError) as exc:
            raise DivergenceError(
                f"solver diverged at iteration {state.iter + 1}: {exc}", trace=trace
            ) from exc
        w_change = float(np.linalg.norm(w.values - state.w.values))
        state = AdmmState(alpha=alpha, v=v, w=w, u=u, iter=state.iter + 1)
        if not _state_is_finite(state):
            raise DivergenceError(
                f"solver produced non-finite iterates at iteration {state.iter}", trace=trace
            )
        trace.append(_record(steering, d, params, state, w_change))
        if observer is not None:
            observer(state)
        if w_change <= params.eta:
            break
    return state.w, float(state.alpha), trace


def converged(trace: list[IterationRecord], eta: float) -> bool:
    """Whether the trace ends because the weight change dropped below eta."""
    return len(trace) >= 2 and trace[-1].w_change <= eta
