"""Exact solutions of the 1D model problem on (-1, 1).

With diffusivity kappa = 4/pi^2 and homogeneous Dirichlet conditions the
operator -(kappa u_x)_x has eigenvalues m^2 and orthonormal
eigenfunctions sin(m pi (x+1)/2), so each Fourier mode decays like
E_nu(-m^2 t^nu) and the field is a sine series.  For the constant
initial value pi/4 the Laplace transform of the field also has the
closed form (pi/4)(1/z)(1 - cosh(w x)/cosh(w)) with w = (pi/2) z^{nu/2},
used by the convergence experiments as a mode-sum-free reference.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .special import FractionalOrder, mittag_leffler_neg

__all__ = [
    "EigenSystem1D",
    "InitialData",
    "exact_mode",
    "exact_field",
    "constant_data_transform",
    "KAPPA",
]

KAPPA = 4.0 / math.pi ** 2


@dataclass(frozen=True)
class EigenSystem1D:
    """Dirichlet eigensystem of -(kappa u_x)_x on (-1, 1), kappa = 4/pi^2."""

    mode_count: int
    kappa: float = KAPPA

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError(f"mode_count must be >= 1, got {self.mode_count}")

    def eigenvalues(self) -> np.ndarray:
        m = np.arange(1, self.mode_count + 1, dtype=float)
        return m * m

    def eigenfunction(self, m: int, x) -> np.ndarray:
        return np.sin(0.5 * m * math.pi * (np.asarray(x, dtype=float) + 1.0))

    def eigenfunction_table(self, x) -> np.ndarray:
        """Matrix phi_m(x_i), shape (mode_count, len(x))."""
        x = np.asarray(x, dtype=float)
        m = np.arange(1, self.mode_count + 1, dtype=float)
        return np.sin(0.5 * math.pi * np.outer(m, x + 1.0))


@dataclass(frozen=True)
class InitialData:
    """Finite modal expansion of the initial value."""

    coefficients: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or len(c) < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def quarter_pi(cls, mode_count: int) -> "InitialData":
        """Modes of the constant pi/4: u0m = 1/m for odd m, 0 for even m."""
        m = np.arange(1, mode_count + 1, dtype=float)
        c = np.where(np.arange(1, mode_count + 1) % 2 == 1, 1.0 / m, 0.0)
        return cls(coefficients=c)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.coefficients ** 2)))


def exact_mode(order: FractionalOrder, lam: float, u0m: float, t: float) -> float:
    """u0m * E_nu(-lam t^nu); exact initial value at t = 0."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if lam < 0.0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if t == 0.0 or lam == 0.0:
        return u0m
    return u0m * mittag_leffler_neg(order, lam * t ** order.nu)


def mode_values(order: FractionalOrder, system: EigenSystem1D,
                data: InitialData, t: float) -> np.ndarray:
    """Coefficients u0m * E_nu(-lam_m t^nu) for every stored mode."""
    if t <= 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    lam = system.eigenvalues()[: len(data.coefficients)]
    decay = np.array(
        [mittag_leffler_neg(order, li * t ** order.nu) for li in lam]
    )
    return data.coefficients * decay


def _truncation_cutoff(system, data, t, nu, tol):
    # Smallest M with sum_{m>M} u0m^2 min(1, 2/(lam_m t^nu))^2 < tol^2.
    # The decay-aware factor keeps M modest for t bounded away from 0;
    # the stored expansion itself is treated as the exact data.
    lam = system.eigenvalues()[: len(data.coefficients)]
    w = data.coefficients ** 2 * np.minimum(1.0, 2.0 / (lam * t ** nu)) ** 2
    tail = np.cumsum(w[::-1])[::-1]  # tail[m] = sum_{k>=m} w_k (0-based)
    small = np.nonzero(tail < tol * tol)[0]
    return int(small[0]) if len(small) else len(w)


def exact_field(order: FractionalOrder, system: EigenSystem1D,
                data: InitialData, t: float, x_points,
                tol: float = 1e-8) -> np.ndarray:
    """u(x, t) by the truncated eigenfunction expansion.

    Truncation keeps the L2 tail below tol; t must be positive since the
    series of discontinuous data converges too slowly at t = 0.
    """
    if t <= 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    cut = max(1, _truncation_cutoff(system, data, t, order.nu, tol))
    lam = system.eigenvalues()[:cut]
    coeff = data.coefficients[:cut]
    decay = np.array(
        [mittag_leffler_neg(order, li * t ** order.nu) for li in lam]
    )
    sub = EigenSystem1D(mode_count=cut, kappa=system.kappa)
    table = sub.eigenfunction_table(x_points)
    return (coeff * decay) @ table


def constant_data_transform(order: FractionalOrder, x, z) -> np.ndarray:
    """Laplace transform of the field for constant initial data pi/4.

    u_hat(x, z) = (pi/4)(1/z)(1 - cosh(w x)/cosh(w)), w = (pi/2) z^{nu/2},
    evaluated stably via e^{w(|x|-1)}(1+e^{-2w|x|})/(1+e^{-2w}), valid for
    z off the cut (-inf, 0] where Re w > 0.  Vectorized over x.
    """
    x = np.abs(np.asarray(x, dtype=float))
    if np.any(x > 1.0 + 1e-14):
        raise ValueError("x must lie in [-1, 1]")
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise ValueError(f"z={z} lies on the branch cut")
    w = 0.5 * math.pi * z ** (0.5 * order.nu)
    if w.real <= 0.0:
        raise ValueError(f"z={z} lies on or across the branch cut")
    ratio = np.exp(w * (x - 1.0)) * (1.0 + np.exp(-2.0 * w * x)) / (1.0 + np.exp(-2.0 * w))
    return (0.25 * math.pi / z) * (1.0 - ratio)
