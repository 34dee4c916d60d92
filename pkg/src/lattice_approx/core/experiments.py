"""
Error metrics, parameter sweeps and decay-rate fits.

A sweep approximates one test function with several methods over a range of
refinements N. All methods share one seeded set of uniform evaluation points,
and one reconstructing lattice per (d, N): the full hyperbolic cross is the
sign-symmetrization of the non-negative one, so cosine and Chebyshev reuse
the lattice found for Fourier-type methods.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from contextlib import ExitStack
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .config import Config
from .exceptions import (
    ApproximationError,
    DegenerateReferenceError,
    InsufficientDataError,
    PreconditionError,
    SpecParseError,
)
from .index_sets import DEFAULT_MAX_CARDINALITY, hyperbolic_cross
from .lattice import LatticeCache, Rank1Lattice, find_reconstructing_lattice
from .reference import ReferenceData, load_reference
from .streams import named_generator
from .systems import (
    ApproximationMethod,
    Approximant,
    MethodKind,
    SampleCache,
    approximate,
    basis_prefactor,
    eval_partial_sum,
    format_eta,
    set_threads,
)
from .testfunctions import get_test_function

logger = logging.getLogger(__name__)

DEFAULT_ETAS = (2.0, 2.5, 4.0)
FINE_ETA_GRID = tuple(sorted({*DEFAULT_ETAS, *(round(2.0 + 0.1 * i, 1) for i in range(1, 20))}))
DEFAULT_METHODS = ("cos", "cheb", "log", "erf")

CSV_COLUMNS = (
    "method",
    "d",
    "N",
    "card_I",
    "M",
    "z",
    "eta",
    "R",
    "seed",
    "eps2",
    "epsinf",
    "wall_ms",
    "error",
)
UNDEFINED = "undefined"


def relative_error(h_values, approx_values, p: Union[int, float, str] = 2, weights=None) -> float:
    """eps_p = ||h - S h||_p / ||h||_p over the evaluation points.

    Args:
        h_values: reference values h(x_j)
        approx_values: approximant values S h(x_j)
        p: 2 or infinity (`inf`, `"inf"`)
        weights: optional pointwise weights applied to both vectors

    Raises:
        PreconditionError: for mismatched or empty inputs, or an unsupported p.
        DegenerateReferenceError: if ||h||_p = 0.
    """
    h = np.asarray(h_values)
    s = np.asarray(approx_values)
    if h.shape != s.shape or h.size < 1:
        raise PreconditionError(f"Value arrays must have equal non-zero length, got {h.shape} and {s.shape}")
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        h, s = w * h, w * s

    if p in (2, "2"):
        reference = np.linalg.norm(h)
        residual = np.linalg.norm(h - s)
    elif p in (np.inf, "inf", "∞"):
        reference = np.max(np.abs(h))
        residual = np.max(np.abs(h - s))
    else:
        raise PreconditionError(f"Unsupported norm p={p}; use 2 or inf")

    if reference == 0.0:
        raise DegenerateReferenceError()
    return float(residual / reference)


def uniform_points(R: int, d: int, seed: int, margin: float = 0.0) -> np.ndarray:
    """R pseudo-uniform points in [0,1)^d from the seeded "points" stream.

    Points with a coordinate within `margin` of 0 or 1 are redrawn from the
    same stream, so the result is still a function of (R, d, seed, margin).
    """
    if R < 1:
        raise PreconditionError(f"Need at least one evaluation point, got R={R}")
    if d < 1:
        raise PreconditionError(f"Dimension must be >= 1, got d={d}")
    rng = named_generator(seed, "points")
    pts = rng.random((R, d))
    if margin > 0.0:
        while True:
            near = np.any((pts < margin) | (pts > 1.0 - margin), axis=1)
            count = int(np.count_nonzero(near))
            if count == 0:
                break
            pts[near] = rng.random((count, d))
    return pts


def points_digest(points: np.ndarray) -> str:
    """sha256 of the points as little-endian float64."""
    return hashlib.sha256(np.ascontiguousarray(points, dtype="<f8").tobytes()).hexdigest()


class SweepConfig(BaseModel):
    """One sweep: methods x refinements for a single dimension."""

    methods: List[str] = Field(default_factory=lambda: list(DEFAULT_METHODS))
    d: int = Field(ge=1)
    N_values: List[int]
    etas: List[float] = Field(default_factory=lambda: list(DEFAULT_ETAS))
    eta_grid: Literal["default", "fine"] = "default"
    R: int = Field(default=100_000, ge=1)
    seed: int = 1
    strategy: Literal["grow-M-random-z", "cbc"] = "grow-M-random-z"
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    threads: Optional[int] = Field(default=None, ge=1)
    weighted_inf: bool = False
    timing: bool = False
    function: str = "b2"
    boundary_margin: float = Field(default=1e-12, ge=0.0, lt=0.5)

    @field_validator("N_values")
    @classmethod
    def _check_n_values(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("N range must not be empty")
        if any(n < 1 for n in v):
            raise ValueError("every N must be >= 1")
        return v

    @field_validator("methods")
    @classmethod
    def _check_methods(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("at least one method is required")
        return v

    @field_validator("etas")
    @classmethod
    def _check_etas(cls, v: List[float]) -> List[float]:
        if any(not math.isfinite(e) or e <= 0 for e in v):
            raise ValueError("eta values must be positive")
        return v

    def eta_values(self) -> List[float]:
        return list(FINE_ETA_GRID) if self.eta_grid == "fine" else list(self.etas)


def expand_methods(specs: Iterable[str], d: int, etas: Sequence[float]) -> List[ApproximationMethod]:
    """Parse method specs; log/erf without an eta expand over `etas`."""
    methods: List[ApproximationMethod] = []
    for text in specs:
        name = text.strip().lower().split(":")[0]
        if name in ("log", "logarithmic", "erf") and "eta=" not in text:
            if not etas:
                raise SpecParseError("method", text, "no eta given and the eta list is empty")
            methods.extend(ApproximationMethod.parse(text, d, eta=e) for e in etas)
        else:
            methods.append(ApproximationMethod.parse(text, d))
    unique: Dict[str, ApproximationMethod] = {}
    for method in methods:
        unique.setdefault(method.label(), method)
    return list(unique.values())


def _format_float(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.10e}"


def _parse_float(text: str) -> Optional[float]:
    return None if text in ("", None) else float(text)


@dataclass
class ExperimentRecord:
    """One (method, N) result of a sweep."""

    method: str
    d: int
    N: int
    card_I: Optional[int] = None
    M: Optional[int] = None
    z: Tuple[int, ...] = ()
    eta: Optional[float] = None
    R: int = 0
    seed: int = 0
    eps2: Optional[float] = None
    epsinf: Optional[float] = None
    epsinf_undefined: bool = False
    epsinf_weighted: Optional[float] = None
    wall_ms: Optional[float] = None
    error: Optional[str] = None
    points_sha256: str = ""

    @property
    def ok(self) -> bool:
        return self.error is None and self.eps2 is not None

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["z"] = list(self.z)
        data["epsinf"] = UNDEFINED if self.epsinf_undefined else self.epsinf
        del data["epsinf_undefined"]
        return data

    def to_csv_row(self) -> List[str]:
        if self.epsinf_undefined:
            epsinf = UNDEFINED
        elif self.epsinf_weighted is not None:
            epsinf = _format_float(self.epsinf_weighted)
        else:
            epsinf = _format_float(self.epsinf)
        return [
            self.method,
            str(self.d),
            str(self.N),
            "" if self.card_I is None else str(self.card_I),
            "" if self.M is None else str(self.M),
            ";".join(str(v) for v in self.z),
            "" if self.eta is None else format_eta(self.eta),
            str(self.R),
            str(self.seed),
            _format_float(self.eps2),
            epsinf,
            "" if self.wall_ms is None else f"{self.wall_ms:.3f}",
            self.error or "",
        ]

    @classmethod
    def from_csv_row(cls, row: Dict[str, str]) -> "ExperimentRecord":
        epsinf_text = row.get("epsinf", "")
        return cls(
            method=row["method"],
            d=int(row["d"]),
            N=int(row["N"]),
            card_I=int(row["card_I"]) if row.get("card_I") else None,
            M=int(row["M"]) if row.get("M") else None,
            z=tuple(int(v) for v in row["z"].split(";")) if row.get("z") else (),
            eta=_parse_float(row.get("eta", "")),
            R=int(row.get("R") or 0),
            seed=int(row.get("seed") or 0),
            eps2=_parse_float(row.get("eps2", "")),
            epsinf=None if epsinf_text == UNDEFINED else _parse_float(epsinf_text),
            epsinf_undefined=epsinf_text == UNDEFINED,
            wall_ms=_parse_float(row.get("wall_ms", "")),
            error=row.get("error") or None,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "ExperimentRecord":
        data = dict(data)
        epsinf = data.get("epsinf")
        data["epsinf_undefined"] = epsinf == UNDEFINED
        data["epsinf"] = None if epsinf == UNDEFINED else epsinf
        data["z"] = tuple(data.get("z") or ())
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


class RecordWriter:
    """Appends records to a CSV or JSON-lines file as they are produced."""

    def __init__(self, path: Union[str, Path], fmt: Literal["csv", "json"] = "csv"):
        self.path = Path(path)
        self.format = fmt
        self._file = None
        self._csv = None

    def __enter__(self) -> "RecordWriter":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        if self.format == "csv":
            self._csv = csv.writer(self._file, lineterminator="\n")
            self._csv.writerow(CSV_COLUMNS)
        return self

    def write(self, record: ExperimentRecord) -> None:
        if self.format == "csv":
            self._csv.writerow(record.to_csv_row())
        else:
            self._file.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        self._file.flush()

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None


def read_records(path: Union[str, Path]) -> List[ExperimentRecord]:
    """Read records from a sweep CSV or JSON-lines file.

    Raises:
        PreconditionError: if the file cannot be parsed.
    """
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if not stripped:
        return []
    try:
        if stripped.startswith("{"):
            return [ExperimentRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or "method" not in reader.fieldnames or "eps2" not in reader.fieldnames:
            raise PreconditionError(f"{path} is not a sweep CSV (missing method/eps2 columns)")
        return [ExperimentRecord.from_csv_row(row) for row in reader]
    except (ValueError, KeyError, TypeError) as e:
        raise PreconditionError(f"Cannot parse records in {path}: {e}")


def evaluate_method(
    method: ApproximationMethod,
    N: int,
    h: Callable[[np.ndarray], np.ndarray],
    lat: Rank1Lattice,
    points: np.ndarray,
    h_values: np.ndarray,
    base: Dict[str, object],
    weighted_inf: bool = False,
    timing: bool = False,
    samples: Optional[SampleCache] = None,
    max_cardinality: int = DEFAULT_MAX_CARDINALITY,
) -> Tuple[ExperimentRecord, Approximant]:
    """Approximate h with one method at refinement N and measure the errors at `points`.

    `base` supplies the record fields that do not depend on the result.
    """
    started = time.perf_counter()
    I = method.frequency_set(N, max_cardinality)
    approximant = approximate(method, h, I, lat, trusted=not method.nonneg, cache=samples, N=N)
    values = eval_partial_sum(approximant, points)

    record = ExperimentRecord(**base, card_I=len(I), eps2=relative_error(h_values, values, 2))
    if method.kind == MethodKind.TRANSFORMED:
        if weighted_inf:
            # w = sqrt(omega / rho) makes the transformed basis bounded
            weights = 1.0 / basis_prefactor(method, points)
            record.epsinf_weighted = relative_error(h_values, values, np.inf, weights=weights)
        else:
            record.epsinf_undefined = True
    else:
        record.epsinf = relative_error(h_values, values, np.inf)
    if timing:
        record.wall_ms = (time.perf_counter() - started) * 1000.0
    return record, approximant


def run_sweep(
    cfg: SweepConfig,
    h: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    cache: Optional[LatticeCache] = None,
    on_record: Optional[Callable[[ExperimentRecord], None]] = None,
    config: Optional[Config] = None,
) -> List[ExperimentRecord]:
    """Approximate `h` with every method at every N and measure the errors.

    Records come out in (N, method) order and are written to `cfg.output`
    as they are produced. A record that fails keeps its error message and
    the sweep moves on.

    `cfg.threads` caps the numba worker pool for the sweep; records do not
    depend on it.
    """
    config = config or Config()
    h = h or get_test_function(cfg.function, cfg.d)
    if cfg.threads is not None:
        set_threads(cfg.threads)
    methods = expand_methods(cfg.methods, cfg.d, cfg.eta_values())
    points = uniform_points(cfg.R, cfg.d, cfg.seed, cfg.boundary_margin)
    digest = points_digest(points)
    h_values = np.asarray(h(points))
    samples = SampleCache()
    max_cardinality = config.index_sets.max_cardinality
    logger.info(
        f"Sweep d={cfg.d}: {len(methods)} method(s) x {len(cfg.N_values)} N value(s), R={cfg.R}"
    )

    records: List[ExperimentRecord] = []
    with ExitStack() as stack:
        writer = stack.enter_context(RecordWriter(cfg.output, cfg.format)) if cfg.output else None
        for N in cfg.N_values:
            lat: Optional[Rank1Lattice] = None
            lattice_error: Optional[str] = None
            try:
                full = hyperbolic_cross(N, cfg.d, max_cardinality=max_cardinality)
                lat = find_reconstructing_lattice(
                    full, cfg.strategy, seed=cfg.seed, config=config.lattice, cache=cache
                )
            except ApproximationError as e:
                lattice_error = str(e)
                logger.warning(f"No lattice for d={cfg.d}, N={N}: {e}")

            for method in methods:
                base = dict(
                    method=method.label(),
                    d=cfg.d,
                    N=N,
                    M=None if lat is None else lat.M,
                    z=() if lat is None else lat.z,
                    eta=method.eta,
                    R=cfg.R,
                    seed=cfg.seed,
                    points_sha256=digest,
                )
                if lat is None:
                    record = ExperimentRecord(**base, error=lattice_error)
                else:
                    try:
                        record, _ = evaluate_method(
                            method,
                            N,
                            h,
                            lat,
                            points,
                            h_values,
                            base,
                            weighted_inf=cfg.weighted_inf,
                            timing=cfg.timing,
                            samples=samples,
                            max_cardinality=max_cardinality,
                        )
                    except ApproximationError as e:
                        logger.warning(f"{method.label()} N={N} failed: {e}")
                        record = ExperimentRecord(**base, error=str(e))
                logger.info(
                    f"{record.method} d={record.d} N={record.N}: "
                    + (f"eps2={record.eps2:.4e}" if record.ok else f"error: {record.error}")
                )
                records.append(record)
                if writer is not None:
                    writer.write(record)
                if on_record is not None:
                    on_record(record)
    logger.debug(f"Sample cache: {samples.hits} hit(s), {samples.misses} miss(es)")
    return records


@dataclass
class DecayFit:
    """Fitted rate r of eps_2 ~ c N^r for one method."""

    method: str
    d: int
    rate: Optional[float]
    points: int
    window: Tuple[int, int]
    error: Optional[str] = None


def _usable(records: Iterable[ExperimentRecord]) -> List[ExperimentRecord]:
    return [r for r in records if r.ok and r.eps2 is not None and r.eps2 > 0 and math.isfinite(r.eps2)]


def default_window(N_values: Sequence[int]) -> Tuple[int, int]:
    """Upper half of the N range."""
    lo, hi = min(N_values), max(N_values)
    return int(math.ceil((lo + hi) / 2)), hi


def fit_decay_rate(
    records: Sequence[ExperimentRecord], window: Optional[Tuple[int, int]] = None
) -> float:
    """Least-squares slope of log eps_2 against log N.

    Args:
        records: records of a single method
        window: inclusive (N_min, N_max); defaults to the upper half of the N range

    Raises:
        InsufficientDataError: with fewer than 3 distinct N in the window.
    """
    usable = _usable(records)
    if not usable:
        raise InsufficientDataError(3, 0)
    lo, hi = window or default_window([r.N for r in usable])
    chosen = [r for r in usable if lo <= r.N <= hi]
    distinct = {r.N for r in chosen}
    if len(distinct) < 3:
        raise InsufficientDataError(3, len(distinct))
    log_n = np.log([float(r.N) for r in chosen])
    log_e = np.log([r.eps2 for r in chosen])
    slope, _ = np.polyfit(log_n, log_e, 1)
    return float(slope)


def decay_table(
    records: Sequence[ExperimentRecord], window: Optional[Tuple[int, int]] = None
) -> List[DecayFit]:
    """One fitted rate per (method, d), in first-seen order.

    Raises:
        InsufficientDataError: if there are no usable records at all.
    """
    usable = _usable(records)
    if not usable:
        raise InsufficientDataError(3, 0)
    groups: Dict[Tuple[str, int], List[ExperimentRecord]] = {}
    for r in usable:
        groups.setdefault((r.method, r.d), []).append(r)

    fits = []
    for (method, d), group in groups.items():
        win = window or default_window([r.N for r in group])
        try:
            rate = fit_decay_rate(group, win)
            count = len({r.N for r in group if win[0] <= r.N <= win[1]})
            fits.append(DecayFit(method, d, rate, count, win))
        except InsufficientDataError as e:
            fits.append(DecayFit(method, d, None, e.got, win, error=str(e)))
    return fits


@dataclass
class BestEta:
    """Smallest-error eta of one transform family at the largest common N."""

    family: str
    eta: float
    N: int
    eps2: float
    candidates: Dict[float, float] = field(default_factory=dict)


def best_eta(records: Sequence[ExperimentRecord]) -> List[BestEta]:
    """For log and erf, the eta with the smallest eps_2 at the largest N they all share."""
    results = []
    for family in ("log", "erf"):
        group = [
            r
            for r in _usable(records)
            if r.method.startswith(f"{family}:") and ":weight=" not in r.method and r.eta is not None
        ]
        if not group:
            continue
        per_eta: Dict[float, Dict[int, float]] = {}
        for r in group:
            per_eta.setdefault(r.eta, {})[r.N] = r.eps2
        common = set.intersection(*(set(v) for v in per_eta.values()))
        if not common:
            continue
        N = max(common)
        candidates = {eta: errors[N] for eta, errors in sorted(per_eta.items())}
        eta = min(candidates, key=lambda e: candidates[e])
        results.append(BestEta(family, eta, N, candidates[eta], candidates))
    return results


@dataclass
class ReferenceComparison:
    method: str
    d: int
    N: int
    eps2: float
    reference: float

    @property
    def ratio(self) -> float:
        return self.eps2 / self.reference


def compare_to_reference(
    records: Sequence[ExperimentRecord], reference: Optional[ReferenceData] = None
) -> List[ReferenceComparison]:
    """Pair every record that has a bundled reference value with that value."""
    reference = reference or load_reference()
    out = []
    for r in _usable(records):
        value = reference.value(r.d, r.method, r.N)
        if value is not None:
            out.append(ReferenceComparison(r.method, r.d, r.N, r.eps2, value))
    return out
