"""
Bundled reference errors and decay rates for the B2-cutoff experiments.

Values are loaded from `data/reference_errors.yaml` and keyed by method
label (`cos`, `cheb`, `log:eta=2`, ...).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional

import yaml

logger = logging.getLogger(__name__)

REFERENCE_FILE = Path(__file__).parent.parent / "data" / "reference_errors.yaml"


@dataclass(frozen=True)
class ReferenceData:
    """Reference eps_2 values per (d, method, N) and decay rate per method."""

    eps2: Dict[int, Dict[str, Dict[int, float]]] = field(default_factory=dict)
    decay_rates: Dict[str, float] = field(default_factory=dict)

    def dims(self) -> List[int]:
        return sorted(self.eps2)

    def methods(self, d: int) -> List[str]:
        return list(self.eps2.get(d, {}))

    def value(self, d: int, method: str, N: int) -> Optional[float]:
        return self.eps2.get(d, {}).get(method, {}).get(N)

    def rate(self, method: str) -> Optional[float]:
        return self.decay_rates.get(method)


@lru_cache(maxsize=None)
def load_reference(path: Optional[str] = None) -> ReferenceData:
    """Load reference values from `path` (defaults to the bundled file)."""
    source = Path(path) if path else REFERENCE_FILE
    with open(source, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    eps2 = {
        int(d): {
            str(method): {int(N): float(v) for N, v in values.items()}
            for method, values in per_method.items()
        }
        for d, per_method in (data.get("eps2") or {}).items()
    }
    rates = {str(m): float(r) for m, r in (data.get("decay_rates") or {}).items()}
    logger.debug(f"Loaded reference values for d={sorted(eps2)} from {source}")
    return ReferenceData(eps2=eps2, decay_rates=rates)
