"""Uniform linear array model: steering vectors, beampatterns, sphere projection.

Angles cross the public API in degrees and are converted to radians exactly
once, internally. All container types are immutable after construction and
safe to share between threads; beampattern evaluation is an independent
per-angle map with no cross-angle reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateInputError

#: Bound on | ||w||^2 - 1 | for vectors flagged as normalized.
UNIT_NORM_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of isotropic elements.

    Parameters
    ----------
    n_elements : int
        Number of antenna elements, at least 2.
    spacing_ratio : float
        Inter-element spacing divided by wavelength. The half-wavelength
        default avoids grating lobes over the full visible region.
    """

    n_elements: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if not isinstance(self.n_elements, (int, np.integer)) or isinstance(self.n_elements, bool):
            raise ContractError("n_elements must be an integer")
        if self.n_elements < 2:
            raise ContractError(f"n_elements must be >= 2, got {self.n_elements}")
        if not self.spacing_ratio > 0:
            raise ContractError(f"spacing_ratio must be positive, got {self.spacing_ratio}")


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Strictly increasing sample angles in degrees, restricted to [-90, +90]."""

    angles_deg: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles_deg, dtype=float)
        if angles.ndim != 1 or angles.size == 0:
            raise ContractError("angle grid must be a non-empty 1-D sequence")
        if np.any(angles < -90.0) or np.any(angles > 90.0):
            raise ContractError("grid angles must lie within [-90, 90] degrees")
        if np.any(np.diff(angles) <= 0):
            raise ContractError("grid angles must be strictly increasing")
        object.__setattr__(self, "angles_deg", _readonly(angles))

    @property
    def count(self) -> int:
        return self.angles_deg.size

    @classmethod
    def uniform(cls, start_deg: float, stop_deg: float, step_deg: float) -> "AngleGrid":
        """Regular grid from start to stop inclusive (when step divides the span)."""
        if not step_deg > 0:
            raise ContractError(f"grid step must be positive, got {step_deg}")
        if not start_deg < stop_deg:
            raise ContractError("grid start must be below grid stop")
        count = int(np.floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1
        return cls(start_deg + step_deg * np.arange(count))


@dataclass(frozen=True, eq=False)
class SteeringSet:
    """Precomputed steering vectors for every grid angle.

    ``vectors`` has shape (K, N); row k is the steering vector of the k-th
    grid angle. Entries have unit modulus and the first element is the phase
    reference (always 1 + 0j).
    """

    vectors: np.ndarray
    geometry: ArrayGeometry
    grid: AngleGrid

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        expected = (self.grid.count, self.geometry.n_elements)
        if vectors.shape != expected:
            raise ContractError(f"steering matrix must have shape {expected}, got {vectors.shape}")
        if np.max(np.abs(np.abs(vectors) - 1.0)) > 1e-12:
            raise ContractError("steering vector entries must have unit modulus")
        if np.max(np.abs(vectors[:, 0] - 1.0)) > 1e-12:
            raise ContractError("steering vectors must be referenced to the first element")
        object.__setattr__(self, "vectors", _readonly(vectors))

    @property
    def n_angles(self) -> int:
        return self.grid.count

    @property
    def n_elements(self) -> int:
        return self.geometry.n_elements


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Complex element weights, optionally flagged as unit-power."""

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size == 0:
            raise ContractError("weight vector must be a non-empty 1-D sequence")
        if self.normalized:
            power = float(np.real(np.vdot(values, values)))
            if abs(power - 1.0) > UNIT_NORM_TOL:
                raise ContractError(
                    f"weights flagged normalized but total power is {power!r}"
                )
        object.__setattr__(self, "values", _readonly(values))

    @property
    def n_elements(self) -> int:
        return self.values.size

    def powers(self) -> np.ndarray:
        """Per-element powers |w_n|^2."""
        return np.abs(self.values) ** 2

    @classmethod
    def unit(cls, values: np.ndarray) -> "WeightVector":
        """Project onto the unit sphere and flag the result as normalized."""
        return cls(project_unit_sphere(np.asarray(values, dtype=complex)), normalized=True)


def steering_vector(geometry: ArrayGeometry, theta_deg: float) -> np.ndarray:
    """Steering vector of the array toward a single direction.

    Element n carries phase 2*pi*spacing_ratio*n*sin(theta), with the first
    element as phase reference.

    Parameters
    ----------
    geometry : ArrayGeometry
    theta_deg : float
        Direction in degrees, within [-90, +90].

    Returns
    -------
    ndarray
        Complex vector of length ``geometry.n_elements``.
    """
    if not -90.0 <= theta_deg <= 90.0:
        raise ContractError(f"theta must lie within [-90, 90] degrees, got {theta_deg}")
    phase = (
        2.0
        * np.pi
        * geometry.spacing_ratio
        * np.sin(np.radians(theta_deg))
        * np.arange(geometry.n_elements)
    )
    return np.exp(1j * phase)


def build_steering_set(geometry: ArrayGeometry, grid: AngleGrid) -> SteeringSet:
    """Precompute steering vectors for all grid angles."""
    sin_theta = np.sin(np.radians(grid.angles_deg))
    phases = 2.0 * np.pi * geometry.spacing_ratio * np.outer(sin_theta, np.arange(geometry.n_elements))
    return SteeringSet(np.exp(1j * phases), geometry, grid)


def beampattern(steering: SteeringSet, w: WeightVector) -> np.ndarray:
    """Radiated power versus angle, |a(theta_k)^H w|^2 for every grid angle.

    Uses the rank-1 structure of the angle quadratic form, so the cost is
    O(N) per angle and the result is exactly real and nonnegative.
    """
    if w.n_elements != steering.n_elements:
        raise ContractError(
            f"weight length {w.n_elements} does not match array size {steering.n_elements}"
        )
    return np.abs(steering.vectors.conj() @ w.values) ** 2


def project_unit_sphere(x: np.ndarray) -> np.ndarray:
    """Scale a nonzero vector to unit l2 norm."""
    x = np.asarray(x)
    nrm = float(np.linalg.norm(x))
    if not nrm > 0.0 or not np.isfinite(nrm):
        raise DegenerateInputError("cannot project a zero or non-finite vector onto the sphere")
    return x / nrm
