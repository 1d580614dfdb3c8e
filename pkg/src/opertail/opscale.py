"""Power matrices, diagonal operator scaling, and the quasi-homogeneous gauge.

Diagonal exponents are the load-bearing case: every closed form downstream
assumes E = DIAG(lambda_i) with lambda_i > 0. General square matrices are
supported only by the power-matrix utility (delegating to scipy's
scaling-and-squaring matrix exponential).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .regvar import RVSpec, eval_rv


@dataclass(frozen=True)
class DiagExponent:
    """Diagonal tail-index matrix E = DIAG(lambda_i), lambda_i > 0."""

    eigenvalues: tuple

    def __init__(self, eigenvalues: Sequence[float]):
        eig = tuple(float(v) for v in np.atleast_1d(np.asarray(eigenvalues, dtype=float)))
        if len(eig) < 1:
            raise ValueError("need at least one eigenvalue")
        for v in eig:
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"all eigenvalues must be positive and finite, got {v}")
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def trace(self) -> float:
        return float(sum(self.eigenvalues))

    @property
    def lam_max(self) -> float:
        return float(max(self.eigenvalues))

    @property
    def argmax_set(self) -> tuple:
        """(lambda) = indices attaining the maximal eigenvalue (within 1e-12)."""
        m = self.lam_max
        return tuple(i for i, v in enumerate(self.eigenvalues)
                     if abs(v - m) <= 1e-12 * m)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues, dtype=float)

    def to_dict(self) -> dict:
        return {"eigenvalues": list(self.eigenvalues)}

    @classmethod
    def from_dict(cls, d: dict) -> "DiagExponent":
        return cls(d["eigenvalues"])


@dataclass(frozen=True)
class ScalingFunction:
    """g(t) = t^E L(t), L(t) = DIAG(ell_i(t)) with slowly varying entries."""

    exponent: DiagExponent
    slow_factors: tuple = ()

    def __post_init__(self):
        factors = tuple(self.slow_factors) if self.slow_factors else tuple(
            RVSpec() for _ in range(self.exponent.dim))
        if len(factors) != self.exponent.dim:
            raise ValueError("need one slow factor per eigenvalue")
        for f in factors:
            if f.rho != 0:
                raise ValueError("slow factors must be slowly varying (rho = 0)")
        object.__setattr__(self, "slow_factors", factors)

    def to_dict(self) -> dict:
        return {"exponent": self.exponent.to_dict(),
                "slow_factors": [f.to_dict() for f in self.slow_factors]}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingFunction":
        return cls(DiagExponent.from_dict(d["exponent"]),
                   tuple(RVSpec.from_dict(f) for f in d.get("slow_factors", [])))


def matrix_exponential(M: np.ndarray) -> np.ndarray:
    """exp(M) = sum_k M^k / k! by scaling-and-squaring."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return expm(M)


def power_matrix(E, t: float) -> np.ndarray:
    """t^E = exp(E log t); diagonal exponents get the exact entrywise form."""
    if t <= 0:
        raise ValueError(f"power_matrix requires t > 0, got {t}")
    if isinstance(E, DiagExponent):
        return np.diag(float(t) ** E.as_array())
    return matrix_exponential(np.asarray(E, dtype=float) * math.log(t))


def scale_vector(g: ScalingFunction, t: float, x: Sequence[float]) -> np.ndarray:
    """Apply g(t) = t^E L(t) componentwise: x_i -> t^{lambda_i} ell_i(t) x_i."""
    if t <= 0:
        raise ValueError(f"scale_vector requires t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    lam = g.exponent.as_array()
    if x.shape[-1] != len(lam):
        raise ValueError(f"dimension mismatch: x has {x.shape[-1]} entries, "
                         f"exponent has {len(lam)}")
    ell = np.array([eval_rv(f, t) for f in g.slow_factors])
    return float(t) ** lam * ell * x


def gauge(E: DiagExponent, x: Sequence[float]) -> float:
    """Quasi-homogeneous gauge [x] = sum_i |x_i|^{1/lambda_i}; [t^E x] = t [x]."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != E.dim:
        raise ValueError("dimension mismatch")
    out = np.sum(np.abs(x) ** (1.0 / E.as_array()), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def gauge_decompose(E: DiagExponent, x: Sequence[float]):
    """Split x != 0 into (radius, direction) with radius = [x], [direction] = 1."""
    x = np.asarray(x, dtype=float)
    r = gauge(E, x)
    if r == 0:
        raise ValueError("gauge_decompose requires x != 0")
    direction = x / r ** E.as_array()
    return r, direction
