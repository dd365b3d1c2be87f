"""Shared domain types and the elementary anisotropic linear algebra.

An anisotropy is a 2x2 diagonalizable matrix with positive eigenvalues,
normalized to trace 2. Both the anisotropy of a simulated field and the
anisotropy of an analyzing space are represented by the same type, stored
in eigendecomposed form (eigenvalues plus unit eigenvectors) so that
matrix powers a^D are exact and unambiguous.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

TRACE_TOL = 1e-12
NORM_TOL = 1e-12
INDEP_TOL = 1e-9


class AnisotropyError(ValueError):
    """Raised when an anisotropy violates its invariants.

    Carries the full list of violations in ``self.violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid anisotropy: " + "; ".join(self.violations))


@dataclass(frozen=True)
class Anisotropy:
    """Trace-2 diagonalizable anisotropy, stored by eigenpairs.

    Eigenpairs are kept in canonical order ``lambda1 <= lambda2``.
    Eigenvectors are unit vectors stored explicitly (never recomputed
    from a matrix) so that sign and ordering are stable.
    """

    lambda1: float
    lambda2: float
    e1: tuple = (1.0, 0.0)
    e2: tuple = (0.0, 1.0)

    def matrix(self) -> np.ndarray:
        """The 2x2 matrix P diag(lambda) P^-1 with P = [e1 e2]."""
        P = np.column_stack([self.e1, self.e2])
        return P @ np.diag([self.lambda1, self.lambda2]) @ np.linalg.inv(P)

    @property
    def eigenvalues(self):
        return (self.lambda1, self.lambda2)

    @property
    def eigenvectors(self):
        return (np.asarray(self.e1), np.asarray(self.e2))

    def is_diagonal(self) -> bool:
        """True when the eigenvectors are the coordinate axes."""
        vecs = [tuple(abs(c) for c in v) for v in (self.e1, self.e2)]
        return sorted(vecs) == [(0.0, 1.0), (1.0, 0.0)]

    def axis_eigenvalue(self, axis: int) -> float:
        """Eigenvalue paired with coordinate axis 0 or 1 (diagonal only)."""
        target = (1.0, 0.0) if axis == 0 else (0.0, 1.0)
        for lam, vec in zip((self.lambda1, self.lambda2), (self.e1, self.e2)):
            if tuple(abs(c) for c in vec) == target:
                return lam
        raise AnisotropyError(["anisotropy is not diagonal"])

    @classmethod
    def diagonal(cls, alpha: float) -> "Anisotropy":
        """diag(alpha, 2 - alpha) with axis eigenvectors."""
        if not 0.0 < alpha < 2.0:
            raise AnisotropyError([f"diagonal parameter {alpha} outside (0, 2)"])
        return validate_anisotropy(alpha, 2.0 - alpha, (1.0, 0.0), (0.0, 1.0))

    @classmethod
    def from_eigen(cls, lambda1, lambda2, e1, e2, normalize=False) -> "Anisotropy":
        """Build from eigenpairs, optionally rescaling eigenvalues to trace 2."""
        if normalize:
            s = lambda1 + lambda2
            if s <= 0:
                raise AnisotropyError([f"cannot normalize trace {s} <= 0"])
            lambda1, lambda2 = 2.0 * lambda1 / s, 2.0 * lambda2 / s
        return validate_anisotropy(lambda1, lambda2, e1, e2)


def anisotropy_violations(lambda1, lambda2, e1, e2):
    """Collect every violated invariant; empty list means valid."""
    out = []
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    trace = lambda1 + lambda2
    if abs(trace - 2.0) > TRACE_TOL:
        out.append(f"trace = {trace} != 2")
    if lambda1 <= 0:
        out.append(f"eigenvalue lambda1 = {lambda1} not positive")
    if lambda2 <= 0:
        out.append(f"eigenvalue lambda2 = {lambda2} not positive")
    for name, vec in (("e1", e1), ("e2", e2)):
        nrm = float(np.hypot(vec[0], vec[1]))
        if abs(nrm - 1.0) > NORM_TOL:
            out.append(f"{name} has norm {nrm} != 1")
    det = float(e1[0] * e2[1] - e1[1] * e2[0])
    if abs(det) <= INDEP_TOL:
        out.append(f"eigenvectors nearly collinear, |det| = {abs(det)}")
    return out


def validate_anisotropy(lambda1, lambda2, e1=(1.0, 0.0), e2=(0.0, 1.0)) -> Anisotropy:
    """Validate eigenpairs and return a canonically ordered Anisotropy.

    Raises AnisotropyError listing all violated invariants at once.
    """
    violations = anisotropy_violations(lambda1, lambda2, e1, e2)
    if violations:
        raise AnisotropyError(violations)
    pairs = [(float(lambda1), tuple(float(c) for c in e1)),
             (float(lambda2), tuple(float(c) for c in e2))]
    pairs.sort(key=lambda p: p[0])
    (l1, v1), (l2, v2) = pairs
    return Anisotropy(l1, l2, v1, v2)


def matrix_power(D: Anisotropy, a: float) -> np.ndarray:
    """a^D = exp(D log a), computed exactly through the eigendecomposition.

    Parameters
    ----------
    D : Anisotropy
    a : positive real

    Returns
    -------
    2x2 ndarray equal to P diag(a^lambda1, a^lambda2) P^-1.
    """
    if not a > 0:
        raise ValueError(f"matrix power base must be positive, got {a}")
    P = np.column_stack([D.e1, D.e2])
    return P @ np.diag([a ** D.lambda1, a ** D.lambda2]) @ np.linalg.inv(P)


@dataclass(frozen=True)
class FieldSpec:
    """Complete generative description of an operator scaling field.

    ``anisotropy`` is the field anisotropy (diagonal in this version),
    ``hurst`` the self-similarity index, ``rho`` the identifier of the
    homogeneous frequency weight, ``grid_n`` the sample count per axis on
    [0,1]^2, and ``seed`` the 64-bit generator seed.
    """

    anisotropy: Anisotropy
    hurst: float
    rho: str = "power_sum"
    grid_n: int = 256
    seed: int = 0

    def __post_init__(self):
        l1, l2 = self.anisotropy.lambda1, self.anisotropy.lambda2
        lam_min = min(l1, l2)
        if not 0.0 < self.hurst < lam_min:
            raise ValueError(
                f"hurst must lie in (0, min({l1:g}, {l2:g})) = (0, {lam_min:g}), "
                f"got {self.hurst}"
            )
        n = self.grid_n
        if n < 64 or (n & (n - 1)) != 0:
            raise ValueError(f"grid_n must be a power of two >= 64, got {n}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not self.anisotropy.is_diagonal():
            raise ValueError("field anisotropy must be diagonal (axis eigenvectors)")

    @property
    def alpha0(self) -> float:
        """Eigenvalue paired with the first coordinate axis."""
        return self.anisotropy.axis_eigenvalue(0)

    def with_seed(self, seed: int) -> "FieldSpec":
        return replace(self, seed=seed)

    @classmethod
    def make(cls, alpha0, hurst, grid_n=256, seed=0, rho="power_sum") -> "FieldSpec":
        """Convenience constructor for the diagonal family diag(alpha0, 2 - alpha0)."""
        return cls(Anisotropy.diagonal(alpha0), hurst, rho, grid_n, seed)


@dataclass(frozen=True, eq=False)
class SampledField:
    """An n x n realization sampled at x = (i/n, j/n) on [0,1]^2."""

    values: np.ndarray = field(repr=False)
    spec: FieldSpec = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.spec.grid_n
        if v.shape != (n, n):
            raise ValueError(f"values shape {v.shape} does not match grid_n {n}")
        if v[0, 0] != 0.0:
            raise ValueError(f"values[0,0] must be exactly 0, got {v[0, 0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def grid_n(self) -> int:
        return self.spec.grid_n

    @property
    def spacing(self) -> float:
        return 1.0 / self.spec.grid_n
