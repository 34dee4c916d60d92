"""
The B2-cutoff test function and its tensor products.

B2(x) = -x^2 + 3/4            for 0 <= x < 1/2
      = (x^2 - 3x + 9/4) / 2  for 1/2 <= x <= 1

is the right half of the centred quadratic B-spline: C^1 on [0, 1] with a
jump in the second derivative at 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .exceptions import DomainError

# Each branch as (lower, upper, polynomial coefficients c0 + c1 x + c2 x^2)
B2_PIECES = (
    (0.0, 0.5, (0.75, 0.0, -1.0)),
    (0.5, 1.0, (1.125, -1.5, 0.5)),
)


def eval_b2(x) -> np.ndarray:
    """Branch-exact B2(x) for x in [0, 1].

    Raises:
        DomainError: if any x lies outside [0, 1].
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError("B2 argument in [0,1]", arr[~((arr >= 0.0) & (arr <= 1.0))].ravel()[0])
    values = np.where(arr < 0.5, -arr * arr + 0.75, 0.5 * (arr * arr - 3.0 * arr + 2.25))
    return values if values.ndim else float(values)


def eval_tensor(x) -> np.ndarray:
    """h(x) = prod_l B2(x_l) for points of shape (d,) or (n, d)."""
    arr = np.asarray(x, dtype=np.float64)
    values = np.prod(eval_b2(arr), axis=-1)
    return values if np.ndim(values) else float(values)


def _piece_antiderivative(coeffs, s: np.ndarray, x: float) -> np.ndarray:
    # integral of p(x) exp(s x) is exp(s x) (p/s - p'/s^2 + p''/s^3) for quadratic p
    c0, c1, c2 = coeffs
    p = c0 + c1 * x + c2 * x * x
    dp = c1 + 2.0 * c2 * x
    ddp = 2.0 * c2
    return np.exp(s * x) * (p / s - dp / s**2 + ddp / s**3)


def b2_fourier_coefficient(k) -> np.ndarray:
    """Exact (B2, exp(2 pi i k .))_{L2([0,1])} = int_0^1 B2(x) exp(-2 pi i k x) dx.

    Integrates both quadratic branches in closed form. k = 0 gives 23/48.
    Since B2(0) != B2(1) the periodic extension jumps at the boundary, so
    |c_k| ~ 5/(16 pi |k|); the |k|^-3 part stems from the second-derivative
    jump at 1/2 and only shows up for odd k.
    """
    k_arr = np.asarray(k, dtype=np.int64)
    flat = k_arr.ravel()
    out = np.empty(flat.shape, dtype=np.complex128)

    zero = flat == 0
    out[zero] = 23.0 / 48.0

    s = -2j * np.pi * flat[~zero].astype(np.float64)
    total = np.zeros(s.shape, dtype=np.complex128)
    for lower, upper, coeffs in B2_PIECES:
        total += _piece_antiderivative(coeffs, s, upper) - _piece_antiderivative(coeffs, s, lower)
    out[~zero] = total

    out = out.reshape(k_arr.shape)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class B2Tensor:
    """The tensored B2-cutoff in dimension `dim`, callable on (n, d) arrays."""

    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("B2 tensor dimension", self.dim)

    def __call__(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=np.float64)
        if pts.shape[-1] != self.dim:
            raise DomainError(f"point dimension (B2 tensor has d={self.dim})", pts.shape[-1])
        return eval_tensor(pts)

    def fourier_coefficient(self, k) -> complex:
        """Product of the univariate coefficients over the coordinates of k."""
        return complex(np.prod(b2_fourier_coefficient(np.asarray(k, dtype=np.int64))))

    def integral(self) -> float:
        return (23.0 / 48.0) ** self.dim


TEST_FUNCTIONS: Dict[str, Callable[[int], Callable[[np.ndarray], np.ndarray]]] = {
    "b2": B2Tensor,
}


def get_test_function(name: str, dim: int) -> Callable[[np.ndarray], np.ndarray]:
    """Look up a registered test function by name."""
    if name not in TEST_FUNCTIONS:
        available = ", ".join(sorted(TEST_FUNCTIONS))
        raise ValueError(f"Test function '{name}' not found. Available: {available}")
    return TEST_FUNCTIONS[name](dim)


def list_test_functions() -> List[str]:
    return sorted(TEST_FUNCTIONS)
