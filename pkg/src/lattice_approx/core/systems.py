"""
Approximation with the four orthonormal systems on [0,1]^d.

- fourier:             exp(2 pi i k.y), full hyperbolic cross, plain lattice nodes
- cosine:              sqrt(2)^|k|_0 prod cos(pi k_l y_l), non-negative cross, tent nodes
- chebyshev:           sqrt(2)^|k|_0 prod cos(k_l arccos(2 y_l - 1)), non-negative cross,
                       Chebyshev-transformed nodes
- transformed-fourier: sqrt(rho(y)/omega(y)) exp(2 pi i k.psi^{-1}(y)), full cross,
                       nodes psi(x_j, eta)

Every system computes its coefficients with one lattice FFT. Cosine and
Chebyshev coefficients come from the Fourier coefficients of h(psi(x)) on the
sign-symmetrized set, folded over the sign mirrors of each k:

    c_k = s(k) 2^(-|k|_0 / 2) sum_{m mirror of k} F_m

with s(k) = 1 for cosine and (-1)^(k_1 + ... + k_d) for Chebyshev, because
T_k(psi(x)) = (-1)^k sqrt(2) cos(2 pi k x). Transformed-Fourier coefficients
are the Fourier coefficients of the periodized samples
f(x) = h(psi(x)) sqrt(omega(psi(x)) psi'(x)).
"""

from __future__ import annotations

import json
import logging
import re
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
import numba
from numba import njit, prange

from .exceptions import (
    ApproximationError,
    BoundarySingularityError,
    DomainError,
    NonFiniteSampleError,
    PreconditionError,
    SpecParseError,
)
from .fourier_core import CoefficientVector, LatticeSamples, dft, reconstruct
from .index_sets import DEFAULT_MAX_CARDINALITY, FrequencySet, SetKind, hyperbolic_cross
from .lattice import Rank1Lattice, is_reconstructing, lattice_bins, lattice_nodes
from .transforms import (
    TransformFamily,
    TransformKind,
    WeightFunction,
    WeightKind,
    boundary_derivative_limit,
    chebyshev_branch_inverse,
    density,
    derivative,
    forward,
    inverse,
)

logger = logging.getLogger(__name__)

Function = Callable[[np.ndarray], np.ndarray]

REAL_RESIDUE_TOLERANCE = 1e-13


class MethodKind(str, Enum):
    """The orthonormal systems."""

    FOURIER = "fourier"
    COSINE = "cosine"
    CHEBYSHEV = "chebyshev"
    TRANSFORMED = "transformed-fourier"


_METHOD_NAMES = {
    "four": MethodKind.FOURIER,
    "fourier": MethodKind.FOURIER,
    "cos": MethodKind.COSINE,
    "cosine": MethodKind.COSINE,
    "cheb": MethodKind.CHEBYSHEV,
    "chebyshev": MethodKind.CHEBYSHEV,
}
_TRANSFORM_NAMES = {
    "log": TransformFamily.LOGARITHMIC,
    "logarithmic": TransformFamily.LOGARITHMIC,
    "erf": TransformFamily.ERF,
}
_WEIGHT_NAMES = {"one": WeightKind.CONSTANT, "cheb": WeightKind.CHEBYSHEV, "rho": WeightKind.DENSITY}
_WEIGHT_LABELS = {kind: name for name, kind in _WEIGHT_NAMES.items()}
_OPTION_PATTERN = re.compile(r"^(?P<key>eta|weight)=(?P<value>.+)$")


def format_eta(value: float) -> str:
    """Shortest text that reads back as the same float (2.0 -> '2', 2.5 -> '2.5')."""
    short = f"{value:g}"
    return short if float(short) == value else repr(float(value))


@dataclass(frozen=True)
class ApproximationMethod:
    """One of the four systems, with its transform and weight where they apply."""

    kind: MethodKind
    dim: int = 1
    transform: Optional[TransformKind] = None
    weight: Optional[WeightFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MethodKind(self.kind))
        if self.dim < 1:
            raise DomainError("method dimension", self.dim)
        if self.kind == MethodKind.TRANSFORMED:
            if self.transform is None or not self.transform.invertible:
                raise PreconditionError(
                    "transformed-fourier needs an invertible (logarithmic or erf) transform"
                )
            if self.transform.dim != self.dim:
                raise PreconditionError(
                    f"Transform dimension {self.transform.dim} != method dimension {self.dim}"
                )
            weight = self.weight or WeightFunction.constant()
            if weight.transform is not None and weight.transform.dim != self.dim:
                raise PreconditionError("Weight transform dimension does not match the method")
            object.__setattr__(self, "weight", weight)
            return
        if self.weight is not None:
            raise PreconditionError(f"{self.kind.value} takes no weight function")
        natural = {
            MethodKind.FOURIER: None,
            MethodKind.COSINE: TransformKind.tent(self.dim),
            MethodKind.CHEBYSHEV: TransformKind.chebyshev(self.dim),
        }[self.kind]
        object.__setattr__(self, "transform", natural)

    @classmethod
    def fourier(cls, dim: int = 1) -> "ApproximationMethod":
        return cls(MethodKind.FOURIER, dim)

    @classmethod
    def cosine(cls, dim: int = 1) -> "ApproximationMethod":
        return cls(MethodKind.COSINE, dim)

    @classmethod
    def chebyshev(cls, dim: int = 1) -> "ApproximationMethod":
        return cls(MethodKind.CHEBYSHEV, dim)

    @classmethod
    def transformed(
        cls, transform: TransformKind, weight: Optional[WeightFunction] = None
    ) -> "ApproximationMethod":
        return cls(MethodKind.TRANSFORMED, transform.dim, transform, weight)

    @classmethod
    def parse(cls, text: str, dim: int = 1, eta: Optional[float] = None) -> "ApproximationMethod":
        """Parse `name[:eta=<f>][:weight=one|cheb|rho]`.

        Names are four, cos, cheb, log and erf. log/erf need an eta, either in
        the text (`eta=2` or per coordinate `eta=2/3/4`) or through `eta`.
        """
        parts = text.strip().lower().split(":")
        name, options = parts[0], parts[1:]
        values: Dict[str, str] = {}
        for option in options:
            match = _OPTION_PATTERN.match(option)
            if not match or match.group("key") in values:
                raise SpecParseError("method", text, f"unexpected option '{option}'")
            values[match.group("key")] = match.group("value")

        if name in _METHOD_NAMES:
            if values:
                raise SpecParseError("method", text, f"'{name}' takes no options")
            return cls(_METHOD_NAMES[name], dim)
        if name not in _TRANSFORM_NAMES:
            raise SpecParseError("method", text, "expected four, cos, cheb, log or erf")

        if "eta" in values:
            try:
                etas = tuple(float(v) for v in values["eta"].split("/"))
            except ValueError:
                raise SpecParseError("method", text, f"eta '{values['eta']}' is not a number")
            if len(etas) not in (1, dim):
                raise SpecParseError("method", text, f"give one eta or {dim} of them")
        elif eta is not None:
            etas = (float(eta),)
        else:
            raise SpecParseError("method", text, f"{name} needs :eta=<float>")

        try:
            transform = TransformKind(_TRANSFORM_NAMES[name], dim, etas)
        except DomainError as e:
            raise SpecParseError("method", text, str(e))

        weight_name = values.get("weight", "one")
        if weight_name not in _WEIGHT_NAMES:
            raise SpecParseError("method", text, "weight must be one, cheb or rho")
        weight = {
            WeightKind.CONSTANT: WeightFunction.constant(),
            WeightKind.CHEBYSHEV: WeightFunction.chebyshev(),
            WeightKind.DENSITY: WeightFunction.density_of(transform),
        }[_WEIGHT_NAMES[weight_name]]
        return cls.transformed(transform, weight)

    @property
    def nonneg(self) -> bool:
        """Cosine and Chebyshev live on the non-negative cross."""
        return self.kind in (MethodKind.COSINE, MethodKind.CHEBYSHEV)

    @property
    def is_real(self) -> bool:
        return self.nonneg

    @property
    def eta(self) -> Optional[float]:
        if self.kind != MethodKind.TRANSFORMED:
            return None
        return self.transform.isotropic_eta

    @property
    def node_key(self) -> str:
        """Identifies the node map x -> y."""
        return "identity" if self.transform is None else self.transform.label()

    @property
    def density_weighted(self) -> bool:
        """omega is the density of the method's own transform, so rho/omega = 1."""
        return (
            self.kind == MethodKind.TRANSFORMED
            and self.weight.kind == WeightKind.DENSITY
            and self.weight.transform == self.transform
        )

    def label(self) -> str:
        """Short form accepted by `parse`, e.g. `cheb` or `erf:eta=2.5`."""
        if self.kind != MethodKind.TRANSFORMED:
            return {
                MethodKind.FOURIER: "four",
                MethodKind.COSINE: "cos",
                MethodKind.CHEBYSHEV: "cheb",
            }[self.kind]
        name = "log" if self.transform.family == TransformFamily.LOGARITHMIC else "erf"
        etas = self.transform.eta
        eta_text = format_eta(etas[0]) if len(set(etas)) == 1 else "/".join(map(format_eta, etas))
        text = f"{name}:eta={eta_text}"
        if self.weight.kind == WeightKind.DENSITY and not self.density_weighted:
            raise PreconditionError("Density weights of a different transform have no label")
        if self.weight.kind != WeightKind.CONSTANT:
            text += f":weight={_WEIGHT_LABELS[self.weight.kind]}"
        return text

    def frequency_set(
        self, N: int, max_cardinality: int = DEFAULT_MAX_CARDINALITY
    ) -> FrequencySet:
        """The hyperbolic cross this method uses at refinement N."""
        return hyperbolic_cross(N, self.dim, nonneg=self.nonneg, max_cardinality=max_cardinality)

    def lattice_set(self, I: FrequencySet) -> FrequencySet:
        """Set the lattice has to reconstruct: I itself, or its sign mirrors for cos/cheb."""
        return I.symmetrized() if self.nonneg else I

    def __str__(self) -> str:
        try:
            return self.label()
        except PreconditionError:
            return f"{self.kind.value}({self.transform.label()}, {self.weight.label()})"


@dataclass(eq=False)
class Approximant:
    """Partial sum S_I h: coefficients plus the lattice they were computed on."""

    method: ApproximationMethod
    coeffs: CoefficientVector
    lattice: Rank1Lattice
    N: Optional[int] = None
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        support = self.coeffs.support
        if support.dim != self.method.dim:
            raise PreconditionError(
                f"Coefficient support dimension {support.dim} != method dimension {self.method.dim}"
            )
        if self.method.nonneg and not support.is_nonneg:
            raise PreconditionError(f"{self.method.kind.value} coefficients need a non-negative support")

    @property
    def support(self) -> FrequencySet:
        return self.coeffs.support


# --- points and boundary behaviour ----------------------------------------------------------


def _points(method: ApproximationMethod, y) -> np.ndarray:
    pts = np.asarray(y, dtype=np.float64)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != method.dim:
        raise DomainError(f"point dimension (method has d={method.dim})", pts.shape[1])
    if np.any(~((pts >= 0.0) & (pts <= 1.0))):
        bad = pts[np.any(~((pts >= 0.0) & (pts <= 1.0)), axis=1)][0]
        raise DomainError("evaluation point in [0,1]^d", bad.tolist())
    return pts


def _coordinate_transform(t: TransformKind, ell: int) -> TransformKind:
    if t.eta is None:
        return TransformKind(t.family, 1)
    return TransformKind(t.family, 1, (t.eta[ell],))


def _coordinate_weight(w: WeightFunction, ell: int) -> WeightFunction:
    if w.kind == WeightKind.DENSITY:
        return WeightFunction.density_of(_coordinate_transform(w.transform, ell))
    return w


def boundary_ratio(method: ApproximationMethod, ell: int) -> Optional[float]:
    """Limit of omega_l(y)/rho_l(y) as y_l -> 0 or 1, in [0, inf].

    Equivalently the limit of omega_l(psi_l(x)) psi_l'(x) at the torus end points.
    None when the limit is not known in closed form (density of an unrelated
    transform).
    """
    t = _coordinate_transform(method.transform, ell)
    w = method.weight
    if w.kind == WeightKind.CONSTANT:
        return boundary_derivative_limit(t, 0)
    if w.kind == WeightKind.DENSITY:
        return 1.0 if _coordinate_transform(w.transform, ell) == t else None
    eta = t.eta[0]
    if t.family == TransformFamily.LOGARITHMIC:
        if eta > 2.0:
            return 0.0
        return eta / np.pi if eta == 2.0 else np.inf
    return 0.0 if eta > np.sqrt(2.0) else np.inf


def _edge(y: np.ndarray) -> np.ndarray:
    return (y <= 0.0) | (y >= 1.0)


def basis_prefactor(method: ApproximationMethod, y) -> np.ndarray:
    """sqrt(rho(y)/omega(y)) for transformed-fourier, 1 for the other systems.

    Raises:
        BoundarySingularityError: if a boundary coordinate makes the factor unbounded.
    """
    pts = _points(method, y)
    values = np.ones(pts.shape[0])
    if method.kind != MethodKind.TRANSFORMED or method.density_weighted:
        return values
    for ell in range(method.dim):
        col = pts[:, ell]
        edge = _edge(col)
        if np.any(edge):
            limit = boundary_ratio(method, ell)
            if limit is None or limit == 0.0:
                raise BoundarySingularityError(str(method))
            values[edge] *= 0.0 if np.isinf(limit) else 1.0 / np.sqrt(limit)
        inner = ~edge
        if np.any(inner):
            t1 = _coordinate_transform(method.transform, ell)
            w1 = _coordinate_weight(method.weight, ell)
            ratio = density(t1, col[inner, None]) / w1.evaluate(col[inner, None])
            values[inner] *= np.sqrt(ratio)
    return values


def periodization_factor(method: ApproximationMethod, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """sqrt(omega(psi(x)) prod_l psi_l'(x_l)) at lattice nodes x with images y = psi(x).

    Coordinates at the torus end point, or whose image rounds to 0 or 1, take
    the boundary limit of omega(psi) psi'.

    Raises:
        BoundarySingularityError: when that limit is infinite or unknown.
    """
    g = np.ones(x.shape[0])
    if method.density_weighted:
        return g
    for ell in range(method.dim):
        xl, yl = x[:, ell], y[:, ell]
        edge = (xl <= 0.0) | (xl >= 1.0) | _edge(yl)
        if np.any(edge):
            limit = boundary_ratio(method, ell)
            if limit is None or np.isinf(limit):
                raise BoundarySingularityError(
                    str(method),
                    f"Samples of '{method}' cannot be periodized: "
                    "omega(psi(x)) psi'(x) is unbounded at the boundary",
                )
            g[edge] *= limit
        inner = ~edge
        if np.any(inner):
            t1 = _coordinate_transform(method.transform, ell)
            w1 = _coordinate_weight(method.weight, ell)
            g[inner] *= w1.evaluate(yl[inner, None]) * derivative(t1, xl[inner, None])
    return np.sqrt(g)


# --- basis evaluation -----------------------------------------------------------------------


def _nnz_scale(K: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0) ** np.count_nonzero(K, axis=1)


def basis_matrix(method: ApproximationMethod, K, y) -> np.ndarray:
    """Matrix B[j, i] = basis function K[i] at point y[j].

    Dense, so meant for small problems and reference computations.
    """
    pts = _points(method, y)
    K = np.atleast_2d(np.asarray(K, dtype=np.int64))
    if K.shape[1] != method.dim:
        raise PreconditionError(f"Frequencies of dimension {K.shape[1]} for a d={method.dim} method")

    if method.kind == MethodKind.FOURIER:
        return np.exp(2j * np.pi * (pts @ K.T))
    if method.kind == MethodKind.TRANSFORMED:
        prefactor = basis_prefactor(method, pts)
        return prefactor[:, None] * np.exp(2j * np.pi * (inverse(method.transform, pts) @ K.T))

    if method.kind == MethodKind.COSINE:
        theta = np.pi * pts
    else:
        theta = np.arccos(np.clip(2.0 * pts - 1.0, -1.0, 1.0))
    cosines = np.cos(K[None, :, :] * theta[:, None, :])
    return (_nnz_scale(K)[None, :] * np.prod(cosines, axis=2)).astype(np.complex128)


def basis_eval(method: ApproximationMethod, k, y) -> Union[complex, np.ndarray]:
    """Basis function k at y (a point, or one value per row of an (n, d) array).

    Raises:
        DomainError: for points outside [0,1]^d.
        BoundarySingularityError: for transformed-fourier at boundary points where
            sqrt(rho/omega) is unbounded.
    """
    column = basis_matrix(method, np.asarray(k, dtype=np.int64).reshape(1, -1), y)[:, 0]
    return column if np.ndim(y) > 1 else complex(column[0])


def transformed_lattice_nodes(method: ApproximationMethod, lat: Rank1Lattice) -> np.ndarray:
    """psi(x_j) for every lattice node in node order; the plain nodes for fourier."""
    if lat.dim != method.dim:
        raise PreconditionError(f"Lattice dimension {lat.dim} != method dimension {method.dim}")
    nodes = lattice_nodes(lat)
    if method.transform is None:
        return nodes
    return forward(method.transform, nodes)


# --- sample reuse ---------------------------------------------------------------------------


def _function_key(h: Function) -> str:
    return f"{type(h).__module__}.{type(h).__qualname__}:{h!r}"


class SampleCache:
    """Function values at transformed lattice nodes.

    Keyed by the lattice, the node map and the function, so one black-box
    evaluation serves every method and refinement that shares them.
    """

    def __init__(self, max_entries: int = 32):
        self.max_entries = max_entries
        self._entries: "OrderedDict[Tuple, np.ndarray]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def fetch(
        self, h: Function, method: ApproximationMethod, lat: Rank1Lattice, nodes: np.ndarray
    ) -> np.ndarray:
        key = (lat.z, lat.M, method.node_key, _function_key(h))
        if key in self._entries:
            self.hits += 1
            self._entries.move_to_end(key)
            return self._entries[key]
        self.misses += 1
        values = sample(h, nodes)
        self._entries[key] = values
        while len(self._entries) > self.max_entries:
            self._entries.popitem(last=False)
        return values

    def clear(self) -> None:
        self._entries.clear()


def sample(h: Function, nodes: np.ndarray) -> np.ndarray:
    """h at every row of `nodes`, as a read-only array.

    Raises:
        NonFiniteSampleError: if any value is NaN or infinite.
    """
    values = np.asarray(h(nodes))
    if values.shape != (nodes.shape[0],):
        values = values.reshape(nodes.shape[0])
    if not np.iscomplexobj(values):
        values = values.astype(np.float64)
    bad = int(np.count_nonzero(~np.isfinite(values)))
    if bad:
        raise NonFiniteSampleError(bad)
    values.setflags(write=False)
    return values


# --- coefficients ---------------------------------------------------------------------------


def _fold_mirrors(
    spectrum: np.ndarray, I: FrequencySet, lat: Rank1Lattice, chebyshev: bool
) -> np.ndarray:
    """Sum the lattice spectrum over the distinct sign mirrors of every k in I."""
    K = I.indices
    total = np.zeros(len(I), dtype=spectrum.dtype)
    for signs in product((1, -1), repeat=I.dim):
        s = np.asarray(signs, dtype=np.int64)
        # flipping a zero coordinate gives the same frequency again
        distinct = np.all((s == 1) | (K != 0), axis=1)
        bins = lattice_bins(K[distinct] * s, lat).astype(np.int64)
        total[distinct] += spectrum[bins]
    total = total * 2.0 ** (-0.5 * np.count_nonzero(K, axis=1))
    if chebyshev:
        total = total * np.where(K.sum(axis=1) % 2 == 0, 1.0, -1.0)
    return total


def approximate(
    method: ApproximationMethod,
    h: Function,
    I: FrequencySet,
    lat: Rank1Lattice,
    trusted: bool = False,
    cache: Optional[SampleCache] = None,
    N: Optional[int] = None,
) -> Approximant:
    """Coefficients of S_I h from the values of h at the transformed lattice nodes.

    Costs one evaluation of h per node, one length-M FFT and O(|I|) gathering.

    Args:
        method: the orthonormal system
        h: vectorized function taking an (M, d) array of points in [0,1]^d
        I: frequency set (non-negative for cosine and chebyshev)
        lat: lattice reconstructing for I, or for its sign mirrors (cosine, chebyshev)
        trusted: skip the reconstruction check
        cache: reuse samples across calls on the same lattice
        N: refinement recorded on the approximant

    Raises:
        PreconditionError: dimension mismatch, negative frequencies for cos/cheb, or
            a lattice that is not reconstructing.
        NonFiniteSampleError: if h returns NaN or infinite values.
        BoundarySingularityError: transformed-fourier samples that cannot be periodized.
    """
    if not (I.dim == method.dim == lat.dim):
        raise PreconditionError(
            f"Dimensions disagree: method d={method.dim}, set d={I.dim}, lattice d={lat.dim}"
        )
    if method.nonneg and not I.is_nonneg:
        raise PreconditionError(f"{method.kind.value} needs a frequency set with k >= 0")

    target = method.lattice_set(I)
    if not trusted and not is_reconstructing(lat, target):
        raise PreconditionError(f"{lat} is not reconstructing for {method} with |I|={len(I)}")

    x = lattice_nodes(lat)
    y = x if method.transform is None else forward(method.transform, x)
    samples = cache.fetch(h, method, lat, y) if cache is not None else sample(h, y)

    if method.nonneg:
        spectrum = dft(samples, "forward") / lat.M
        values = _fold_mirrors(spectrum, I, lat, chebyshev=method.kind == MethodKind.CHEBYSHEV)
        if not np.iscomplexobj(samples):
            residue = float(np.max(np.abs(values.imag), initial=0.0))
            scale = max(1.0, float(np.max(np.abs(samples), initial=0.0)))
            if residue > REAL_RESIDUE_TOLERANCE * scale:
                raise ApproximationError(
                    f"{method} coefficients of a real function have imaginary residue {residue:.3e}"
                )
            values = values.real
        coeffs = CoefficientVector(I, values)
    else:
        periodized = samples
        if method.kind == MethodKind.TRANSFORMED:
            periodized = samples * periodization_factor(method, x, y)
        coeffs = reconstruct(LatticeSamples(lat, periodized), I, trusted=True)

    logger.debug(f"{method}: {len(I)} coefficients from M={lat.M} samples")
    return Approximant(method, coeffs, lat, N=N if N is not None else I.N, samples=samples)


# --- partial sums ---------------------------------------------------------------------------


def set_threads(threads: Optional[int]) -> int:
    """Cap numba's worker threads; returns the count in effect.

    None restores the full pool. Results do not depend on the count.
    """
    available = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        numba.set_num_threads(available)
        return available
    effective = max(1, min(int(threads), available))
    if effective < threads:
        logger.warning(f"Only {available} thread(s) available; using {effective}")
    numba.set_num_threads(effective)
    return effective


@njit(parallel=True, cache=True)
def _cosine_sums(theta, K, coeffs, kmax):
    R, d = theta.shape
    out = np.zeros(R)
    for r in prange(R):
        table = np.empty((d, kmax + 1))
        for ell in range(d):
            for j in range(kmax + 1):
                table[ell, j] = np.cos(j * theta[r, ell])
        acc = 0.0
        for i in range(K.shape[0]):
            term = coeffs[i]
            for ell in range(d):
                term *= table[ell, K[i, ell]]
            acc += term
        out[r] = acc
    return out


@njit(parallel=True, cache=True)
def _exponential_sums(t, K, coeffs, kmax):
    R, d = t.shape
    out = np.zeros(R, dtype=np.complex128)
    for r in prange(R):
        table = np.empty((d, 2 * kmax + 1), dtype=np.complex128)
        for ell in range(d):
            for j in range(-kmax, kmax + 1):
                angle = j * t[r, ell]
                table[ell, j + kmax] = np.cos(angle) + 1j * np.sin(angle)
        acc = 0.0 + 0.0j
        for i in range(K.shape[0]):
            term = coeffs[i]
            for ell in range(d):
                term *= table[ell, K[i, ell] + kmax]
            acc += term
        out[r] = acc
    return out


def eval_partial_sum(a: Approximant, pts) -> np.ndarray:
    """S_I h(y) = sum_k c_k b_k(y) at arbitrary points, O(|I| d) per point.

    Points are processed in parallel (numba threads); each point's sum runs
    in support order, so results do not depend on the thread count.

    Raises:
        DomainError: for points outside [0,1]^d.
        BoundarySingularityError: as in `basis_eval`.
    """
    method = a.method
    y = _points(method, pts)
    K = np.ascontiguousarray(a.support.indices)
    kmax = int(np.max(np.abs(K), initial=0))
    values = a.coeffs.values

    if method.nonneg:
        if method.kind == MethodKind.COSINE:
            theta = np.pi * y
        else:
            theta = np.arccos(np.clip(2.0 * y - 1.0, -1.0, 1.0))
        theta = np.ascontiguousarray(theta)
        scaled = values * _nnz_scale(K)
        out = _cosine_sums(theta, K, np.ascontiguousarray(scaled.real), kmax).astype(np.complex128)
        if np.any(scaled.imag != 0.0):
            out += 1j * _cosine_sums(theta, K, np.ascontiguousarray(scaled.imag), kmax)
        return out

    if method.kind == MethodKind.FOURIER:
        return _exponential_sums(np.ascontiguousarray(2.0 * np.pi * y), K, values, kmax)

    prefactor = basis_prefactor(method, y)
    t = np.ascontiguousarray(2.0 * np.pi * inverse(method.transform, y))
    return prefactor * _exponential_sums(t, K, values, kmax)


# --- Chebyshev as a transformed Fourier system ----------------------------------------------


def chebyshev_equivalence_check(N: int, grid) -> float:
    """Largest deviation between the folded transformed-Fourier basis and T_k.

    With the Chebyshev transform and omega = rho the transformed Fourier basis
    is phi_k(y) = exp(2 pi i k psi^{-1}(y)), and on the branch
    psi^{-1}(y) = 1/2 + arccos(2y - 1)/(2 pi) this is (-1)^k exp(i k arccos(2y - 1)).
    Combining phi_0 and (-1)^k (phi_k + phi_{-k}) / sqrt(2) for k >= 1 must give
    T_k. Returns the sup over the grid and 0 <= k <= N.

    Raises:
        DomainError: if the grid has points outside (0, 1).
    """
    if N < 0:
        raise DomainError("equivalence check degree", N)
    y = np.asarray(grid, dtype=np.float64).ravel()
    if y.size == 0 or np.any(~((y > 0.0) & (y < 1.0))):
        raise DomainError("equivalence grid (strictly interior points)", None)

    x = chebyshev_branch_inverse(y)
    cheb = ApproximationMethod.chebyshev(1)
    worst = 0.0
    for k in range(N + 1):
        if k == 0:
            combined = np.ones_like(y, dtype=np.complex128)
        else:
            phi_plus = np.exp(2j * np.pi * k * x)
            phi_minus = np.exp(-2j * np.pi * k * x)
            combined = (-1.0) ** k * (phi_plus + phi_minus) / np.sqrt(2.0)
        reference = basis_eval(cheb, (k,), y[:, None])
        worst = max(worst, float(np.max(np.abs(combined - reference))))
    return worst


# --- persistence ----------------------------------------------------------------------------

APPROXIMANT_FORMAT = "lattice-approx/approximant"
APPROXIMANT_VERSION = 1


def save_approximant(a: Approximant, path: Union[str, Path]) -> None:
    """Write one JSON header line followed by the little-endian complex128 coefficients."""
    support = a.support
    header = {
        "format": APPROXIMANT_FORMAT,
        "version": APPROXIMANT_VERSION,
        "method": a.method.label(),
        "d": a.method.dim,
        "N": a.N,
        "eta": a.method.eta,
        "lattice": a.lattice.to_dict(),
        "index_set": support.descriptor,
        "count": len(support),
    }
    if support.kind == SetKind.CUSTOM or support.N is None:
        header["indices"] = support.indices.tolist()
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        f.write(a.coeffs.to_bytes())


def load_approximant(path: Union[str, Path]) -> Approximant:
    """Read an approximant written by `save_approximant`.

    Raises:
        PreconditionError: for foreign files, truncated blocks or a support
            that no longer matches its recorded digest.
    """
    with open(path, "rb") as f:
        try:
            header = json.loads(f.readline().decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as e:
            raise PreconditionError(f"{path} has no approximant header: {e}")
        payload = f.read()

    if header.get("format") != APPROXIMANT_FORMAT:
        raise PreconditionError(f"{path} is not an approximant file")
    d = int(header["d"])
    method = ApproximationMethod.parse(header["method"], d)
    descriptor = header["index_set"]
    if "indices" in header:
        support = FrequencySet.from_indices(
            np.asarray(header["indices"], dtype=np.int64).reshape(-1, d),
            kind=SetKind(descriptor["kind"]),
            N=descriptor["N"],
        )
    else:
        support = hyperbolic_cross(
            descriptor["N"], d, nonneg=descriptor["kind"] == SetKind.NONNEG_CROSS.value
        )
    if support.descriptor != descriptor:
        raise PreconditionError(f"Support of {path} does not match its recorded digest")
    if len(payload) != 16 * int(header["count"]):
        raise PreconditionError(
            f"{path}: expected {header['count']} coefficients, found {len(payload) // 16}"
        )
    coeffs = CoefficientVector.from_bytes(support, payload)
    return Approximant(method, coeffs, Rank1Lattice.from_dict(header["lattice"]), N=header["N"])
