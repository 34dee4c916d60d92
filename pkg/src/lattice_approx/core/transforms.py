"""
Transformations between the torus [0,1)^d and the cube [0,1]^d.

Four families act coordinate-wise:

- tent:        2x on [0, 1/2), 2 - 2x on [1/2, 1]
- chebyshev:   1/2 + 1/2 cos(2 pi (x - 1/2))
- logarithmic: 1/2 + 1/2 tanh(eta atanh(2x - 1)) = x^eta / (x^eta + (1 - x)^eta)
- erf:         1/2 erf(eta erf^{-1}(2x - 1)) + 1/2

tent and chebyshev are two-to-one and have no inverse. The parameterized
(torus-to-cube) families satisfy psi^{-1}(y, eta) = psi(y, 1/eta), pin
psi(0) = 0 and psi(1) = 1, and have density rho(y, eta) = (psi^{-1})'(y, eta).
Multivariate quantities are products over coordinates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, logit

from .exceptions import DomainError, NotInvertibleError, SpecParseError
from .special import erfc, erfinv_centered

EtaLike = Union[float, Sequence[float]]


class TransformFamily(str, Enum):
    """Transformation families."""

    TENT = "tent"
    CHEBYSHEV = "chebyshev"
    LOGARITHMIC = "logarithmic"
    ERF = "erf"


PARAMETERIZED = (TransformFamily.LOGARITHMIC, TransformFamily.ERF)

_SHORT_NAMES = {
    "tent": TransformFamily.TENT,
    "cheb": TransformFamily.CHEBYSHEV,
    "chebyshev": TransformFamily.CHEBYSHEV,
    "log": TransformFamily.LOGARITHMIC,
    "logarithmic": TransformFamily.LOGARITHMIC,
    "erf": TransformFamily.ERF,
}

_SPEC_PATTERN = re.compile(r"^(?P<name>[a-z]+)(?::eta=(?P<eta>[^:]+))?$")


@dataclass(frozen=True)
class TransformKind:
    """A transformation family member in dimension `dim`, with per-coordinate eta."""

    family: TransformFamily
    dim: int = 1
    eta: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "family", TransformFamily(self.family))
        if self.dim < 1:
            raise DomainError("transform dimension", self.dim)
        if self.family in PARAMETERIZED:
            if self.eta is None:
                raise DomainError(f"{self.family.value} transform needs eta", None)
            eta = tuple(float(v) for v in np.broadcast_to(np.asarray(self.eta, float), (self.dim,)))
            if any(not np.isfinite(v) or v <= 0 for v in eta):
                raise DomainError("eta (must be positive)", eta)
            object.__setattr__(self, "eta", eta)
        elif self.eta is not None:
            raise DomainError(f"{self.family.value} transform takes no eta", self.eta)

    @classmethod
    def tent(cls, dim: int = 1) -> "TransformKind":
        return cls(TransformFamily.TENT, dim)

    @classmethod
    def chebyshev(cls, dim: int = 1) -> "TransformKind":
        return cls(TransformFamily.CHEBYSHEV, dim)

    @classmethod
    def logarithmic(cls, eta: EtaLike, dim: int = 1) -> "TransformKind":
        return cls(TransformFamily.LOGARITHMIC, dim, _as_tuple(eta))

    @classmethod
    def erf(cls, eta: EtaLike, dim: int = 1) -> "TransformKind":
        return cls(TransformFamily.ERF, dim, _as_tuple(eta))

    @classmethod
    def parse(cls, text: str, dim: int = 1) -> "TransformKind":
        """Parse `tent`, `cheb`, `log:eta=4` or `erf:eta=2.5` (isotropic eta)."""
        match = _SPEC_PATTERN.match(text.strip().lower())
        if not match or match.group("name") not in _SHORT_NAMES:
            raise SpecParseError("transform", text, "expected tent, cheb, log:eta=<f> or erf:eta=<f>")
        family = _SHORT_NAMES[match.group("name")]
        eta_text = match.group("eta")
        if family in PARAMETERIZED:
            if eta_text is None:
                raise SpecParseError("transform", text, f"{family.value} needs :eta=<float>")
            try:
                eta = float(eta_text)
            except ValueError:
                raise SpecParseError("transform", text, f"eta '{eta_text}' is not a number")
            try:
                return cls(family, dim, (eta,))
            except DomainError as e:
                raise SpecParseError("transform", text, str(e))
        if eta_text is not None:
            raise SpecParseError("transform", text, f"{family.value} takes no eta")
        return cls(family, dim)

    @property
    def invertible(self) -> bool:
        return self.family in PARAMETERIZED

    @property
    def isotropic_eta(self) -> Optional[float]:
        """The common eta when all coordinates share it, else None."""
        if self.eta is None or len(set(self.eta)) != 1:
            return None
        return self.eta[0]

    def reciprocal(self) -> "TransformKind":
        """Same family with eta replaced by 1/eta."""
        if not self.invertible:
            raise NotInvertibleError(self.family.value)
        return TransformKind(self.family, self.dim, tuple(1.0 / v for v in self.eta))

    def label(self) -> str:
        eta = self.isotropic_eta
        if eta is None:
            return self.family.value if self.eta is None else f"{self.family.value}:eta={self.eta}"
        return f"{self.family.value}:eta={eta:g}"


def _as_tuple(eta: EtaLike) -> Tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(eta, dtype=float)))


class WeightKind(str, Enum):
    """Weight functions of the weighted L2 space on the cube."""

    CONSTANT = "one"
    CHEBYSHEV = "chebyshev"
    DENSITY = "density"


@dataclass(frozen=True)
class WeightFunction:
    """omega(y): constant one, the Chebyshev weight, or the density of a transform."""

    kind: WeightKind = WeightKind.CONSTANT
    transform: Optional[TransformKind] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if self.kind == WeightKind.DENSITY and self.transform is None:
            raise DomainError("density weight needs a transform", None)

    @classmethod
    def constant(cls) -> "WeightFunction":
        return cls(WeightKind.CONSTANT)

    @classmethod
    def chebyshev(cls) -> "WeightFunction":
        return cls(WeightKind.CHEBYSHEV)

    @classmethod
    def density_of(cls, transform: TransformKind) -> "WeightFunction":
        return cls(WeightKind.DENSITY, transform)

    @property
    def bounded(self) -> bool:
        return self.kind == WeightKind.CONSTANT

    def evaluate(self, y) -> np.ndarray:
        """omega at points `y` of shape (d,) or (n, d).

        Raises:
            DomainError: for the unbounded weights on boundary points.
        """
        pts = _as_points(y)
        if self.kind == WeightKind.CONSTANT:
            values = np.ones(pts.shape[0])
        elif self.kind == WeightKind.CHEBYSHEV:
            _require_interior(pts, "Chebyshev weight")
            values = np.prod(1.0 / (np.pi * np.sqrt(pts * (1.0 - pts))), axis=1)
        else:
            values = density(self.transform, pts)
        return values if np.ndim(y) > 1 else values[0]

    def label(self) -> str:
        if self.kind == WeightKind.DENSITY:
            return f"density({self.transform.label()})"
        return self.kind.value


def _as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts[None, :]
    return pts


def _check_dim(t: TransformKind, pts: np.ndarray) -> None:
    if pts.shape[1] != t.dim:
        raise DomainError(f"point dimension (transform has d={t.dim})", pts.shape[1])


def _require_unit_cube(pts: np.ndarray, what: str) -> None:
    if np.any(~np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
        bad = pts[np.any(~((pts >= 0.0) & (pts <= 1.0)), axis=1)][0]
        raise DomainError(f"{what} argument in [0,1]^d", bad.tolist())


def _require_interior(pts: np.ndarray, what: str) -> None:
    if np.any(~((pts > 0.0) & (pts < 1.0))):
        bad = pts[np.any(~((pts > 0.0) & (pts < 1.0)), axis=1)][0]
        raise DomainError(f"{what} argument in (0,1)^d", bad.tolist())


def _shape_like(values: np.ndarray, x) -> np.ndarray:
    ndim = np.ndim(x)
    if ndim == 0:
        return values.reshape(())
    if ndim == 1:
        return values[0]
    return values


# univariate maps; x is an array, eta a positive scalar


def _tent(x: np.ndarray) -> np.ndarray:
    return np.where(x < 0.5, 2.0 * x, 2.0 - 2.0 * x)


def _chebyshev(x: np.ndarray) -> np.ndarray:
    return 0.5 + 0.5 * np.cos(2.0 * np.pi * (x - 0.5))


def _logarithmic(x: np.ndarray, eta: float) -> np.ndarray:
    # expit(eta * logit(x)) = x^eta / (x^eta + (1-x)^eta), stable near both ends
    with np.errstate(divide="ignore"):
        y = expit(eta * logit(x))
    return np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, y))


def _erf_map(x: np.ndarray, eta: float) -> np.ndarray:
    u = erfinv_centered(x)
    with np.errstate(invalid="ignore"):
        y = 0.5 * erfc(-eta * u)
    return np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, y))


def _logarithmic_density(y: np.ndarray, eta: float) -> np.ndarray:
    # derivative of expit(logit(y)/eta); equals the closed form
    # (4/eta)(4y-4y^2)^(1/eta-1) / ((2y)^(1/eta) + (2-2y)^(1/eta))^2
    s = expit(logit(y) / eta)
    return s * (1.0 - s) / (eta * y * (1.0 - y))


def _erf_density(y: np.ndarray, eta: float) -> np.ndarray:
    u = erfinv_centered(y)
    return np.exp((1.0 - 1.0 / eta**2) * u * u) / eta


def _chebyshev_density(y: np.ndarray) -> np.ndarray:
    return 1.0 / (2.0 * np.pi * np.sqrt(y * (1.0 - y)))


def _forward_coordinate(t: TransformKind, x: np.ndarray, ell: int) -> np.ndarray:
    if t.family == TransformFamily.TENT:
        return _tent(x)
    if t.family == TransformFamily.CHEBYSHEV:
        return _chebyshev(x)
    if t.family == TransformFamily.LOGARITHMIC:
        return _logarithmic(x, t.eta[ell])
    return _erf_map(x, t.eta[ell])


def _density_coordinate(t: TransformKind, y: np.ndarray, ell: int) -> np.ndarray:
    if t.family == TransformFamily.CHEBYSHEV:
        return _chebyshev_density(y)
    if t.family == TransformFamily.LOGARITHMIC:
        return _logarithmic_density(y, t.eta[ell])
    if t.family == TransformFamily.ERF:
        return _erf_density(y, t.eta[ell])
    raise DomainError("density of the tent transform", None)


def forward(t: TransformKind, x) -> np.ndarray:
    """psi(x), coordinate-wise, for points of shape (d,) or (n, d).

    Raises:
        DomainError: if any coordinate lies outside [0, 1].
    """
    pts = _as_points(x)
    _check_dim(t, pts)
    _require_unit_cube(pts, f"{t.family.value} transform")
    out = np.empty_like(pts)
    for ell in range(t.dim):
        out[:, ell] = _forward_coordinate(t, pts[:, ell], ell)
    return _shape_like(out, x)


def inverse(t: TransformKind, y) -> np.ndarray:
    """psi^{-1}(y, eta) = psi(y, 1/eta).

    Raises:
        NotInvertibleError: for tent and chebyshev.
    """
    if not t.invertible:
        raise NotInvertibleError(t.family.value)
    return forward(t.reciprocal(), y)


def density(t: TransformKind, y) -> np.ndarray:
    """rho(y) = prod_l rho_l(y_l, eta_l) at strictly interior points.

    The Chebyshev density is 1/(2 pi sqrt(y(1-y))).

    Raises:
        DomainError: on boundary points (where rho may be unbounded) and for tent.
    """
    pts = _as_points(y)
    _check_dim(t, pts)
    _require_interior(pts, f"{t.family.value} density")
    values = np.ones(pts.shape[0])
    for ell in range(t.dim):
        values *= _density_coordinate(t, pts[:, ell], ell)
    return values if np.ndim(y) > 1 else values[0]


def derivative(t: TransformKind, x) -> np.ndarray:
    """prod_l |psi_l'(x_l)| at strictly interior points.

    Parameterized families use psi'(x, eta) = rho(x, 1/eta), which equals
    1/rho(psi(x, eta), eta) without going through psi(x).

    Raises:
        DomainError: on boundary points and for tent.
    """
    pts = _as_points(x)
    _check_dim(t, pts)
    _require_interior(pts, f"{t.family.value} derivative")
    values = np.ones(pts.shape[0])
    for ell in range(t.dim):
        xl = pts[:, ell]
        if t.family == TransformFamily.TENT:
            raise DomainError("derivative of the tent transform", None)
        if t.family == TransformFamily.CHEBYSHEV:
            values *= np.pi * np.abs(np.sin(2.0 * np.pi * (xl - 0.5)))
        else:
            values *= _density_coordinate(t.reciprocal(), xl, ell)
    return values if np.ndim(x) > 1 else values[0]


def chebyshev_branch_inverse(y) -> np.ndarray:
    """The right branch 1/2 + arccos(2y - 1)/(2 pi) of the Chebyshev transform.

    Maps [0, 1] onto [1/2, 1]; used where a one-sided inverse is enough.
    """
    y = np.asarray(y, dtype=np.float64)
    return 0.5 + np.arccos(np.clip(2.0 * y - 1.0, -1.0, 1.0)) / (2.0 * np.pi)


def boundary_derivative_limit(t: TransformKind, ell: int) -> float:
    """lim psi_l'(x) as x -> 0 or 1 for a parameterized family.

    0 for eta > 1 (the C_0 case), 1 for eta = 1, infinite otherwise.
    """
    eta = t.eta[ell]
    if eta > 1.0:
        return 0.0
    if eta == 1.0:
        return 1.0
    return np.inf
