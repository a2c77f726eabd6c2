"""
Rational datum - m₀, poles and spins of the simple-pole ansatz
src/modules/datasets/rational_data.py

    m(0, x) = m₀ + Σ s_j / (x - x_j) + Σ s̄_j / (x - x̄_j),   Im x_j > 0

Datum files are JSON. Complex numbers are always [re, im] pairs:

    {
      "m0": [0.0, 0.0, 1.0],
      "poles": [[0.0, 1.0]],
      "spins": [[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]],
      "metadata": {...}            # optional, carried through untouched
    }
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..utils.errors import SchemaError

logger = logging.getLogger(__name__)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RationalData:
    """Initial datum (m₀, x_j, s_j). Arrays are copied and made read-only."""
    m0: np.ndarray
    poles: np.ndarray
    spins: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        m0 = np.asarray(self.m0, dtype=complex).reshape(-1)
        poles = np.asarray(self.poles, dtype=complex).reshape(-1)
        spins = np.asarray(self.spins, dtype=complex).reshape(-1, 3)
        if m0.shape != (3,):
            raise ValueError(f"m0 must have 3 components, got shape {m0.shape}")
        if spins.shape[0] != poles.shape[0]:
            raise ValueError(f"Got {poles.shape[0]} poles but {spins.shape[0]} spins")
        object.__setattr__(self, "m0", _frozen(m0))
        object.__setattr__(self, "poles", _frozen(poles))
        object.__setattr__(self, "spins", _frozen(spins))

    @property
    def n(self) -> int:
        return int(self.poles.shape[0])

    def with_spins(self, spins: ArrayLike) -> "RationalData":
        return RationalData(self.m0, self.poles, spins, dict(self.metadata))

    def with_poles(self, poles: ArrayLike) -> "RationalData":
        return RationalData(self.m0, poles, self.spins, dict(self.metadata))

    def field_at(self, x: ArrayLike) -> np.ndarray:
        """m(0, x) by direct partial fractions; returns (..., 3) complex."""
        x = np.asarray(x, dtype=complex)[..., None]
        value = np.broadcast_to(self.m0, x.shape[:-1] + (3,)).astype(complex)
        for xj, sj in zip(self.poles, self.spins):
            value = value + sj / (x - xj) + np.conj(sj) / (x - np.conj(xj))
        return value

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "m0": [float(v.real) for v in self.m0],
            "poles": [_complex_to_pair(x) for x in self.poles],
            "spins": [[_complex_to_pair(c) for c in s] for s in self.spins],
        }
        if self.metadata:
            payload["metadata"] = self.metadata
        return payload


def _complex_to_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _pair_to_complex(value: Any, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        raise SchemaError("complex numbers must be [re, im] pairs, got a bare number", path)
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaError(f"expected [re, im] pair, got {value!r}", path)
    re, im = value
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise SchemaError(f"non-numeric component {part!r}", path)
    return complex(float(re), float(im))


def _real_component(value: Any, path: str) -> float:
    if isinstance(value, (list, tuple)):
        z = _pair_to_complex(value, path)
        if z.imag != 0.0:
            raise SchemaError(f"m0 must be real, got imaginary part {z.imag}", path)
        return z.real
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"non-numeric component {value!r}", path)
    return float(value)


def data_from_dict(payload: Any) -> RationalData:
    """
    Build a RationalData from the decoded JSON payload.

    Raises:
        SchemaError: with the offending field path
    """
    if not isinstance(payload, dict):
        raise SchemaError("top level must be an object", "$")
    for key in ("m0", "poles", "spins"):
        if key not in payload:
            raise SchemaError("missing required field", f"$.{key}")

    m0_raw = payload["m0"]
    if not isinstance(m0_raw, list) or len(m0_raw) != 3:
        raise SchemaError("expected a list of 3 components", "$.m0")
    m0 = [_real_component(v, f"$.m0[{i}]") for i, v in enumerate(m0_raw)]

    poles_raw = payload["poles"]
    if not isinstance(poles_raw, list):
        raise SchemaError("expected a list of [re, im] pairs", "$.poles")
    poles = [_pair_to_complex(v, f"$.poles[{j}]") for j, v in enumerate(poles_raw)]

    spins_raw = payload["spins"]
    if not isinstance(spins_raw, list) or not spins_raw:
        raise SchemaError("expected a non-empty list of spins", "$.spins")
    if len(spins_raw) != len(poles):
        raise SchemaError(f"{len(spins_raw)} spins for {len(poles)} poles", "$.spins")

    spins = []
    for j, s in enumerate(spins_raw):
        if not isinstance(s, list) or len(s) != 3:
            raise SchemaError("expected 3 complex components", f"$.spins[{j}]")
        spins.append([_pair_to_complex(c, f"$.spins[{j}][{k}]") for k, c in enumerate(s)])

    metadata = payload.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaError("metadata must be an object", "$.metadata")

    return RationalData(np.array(m0), np.array(poles), np.array(spins), metadata)


def load_datum(path: Union[str, Path]) -> RationalData:
    """Read a datum file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Datum file not found: {path}")
    try:
        with open(path, "r") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON ({e.msg} at line {e.lineno})", "$") from e

    data = data_from_dict(payload)
    logger.info(f"Loaded datum with N={data.n} from {path}")
    return data


def save_datum(data: RationalData, path: Optional[Union[str, Path]] = None) -> str:
    """Serialize a datum; writes to `path` when given and returns the JSON text."""
    text = json.dumps(data.to_dict(), indent=2)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(text + "\n")
        logger.info(f"Datum saved to {path}")
    return text
