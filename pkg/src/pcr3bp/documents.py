"""Orbit documents and report serialization.

JSON output uses a fixed 17-significant-digit float format so repeated runs
of a deterministic pipeline produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, is_dataclass

import numpy as np

from . import dynamics
from .errors import SchemaError

__all__ = [
    "ORBIT_SCHEMA_VERSION",
    "OrbitDocument",
    "dumps_json",
    "write_trajectory_csv",
    "write_polyline_csv",
    "to_jsonable",
]

ORBIT_SCHEMA_VERSION = "1"
_JACOBI_SAMPLE_TOLERANCE = 1e-6


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def dumps_json(obj, indent: int = 0) -> str:
    """Deterministic JSON writer with %.17g floats and two-space indentation."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{key}": {dumps_json(value, indent + 1)}' for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        flat = all(isinstance(v, (int, float, np.floating, np.integer)) for v in obj)
        if flat:
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        items = [f"{pad}  {dumps_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    raise TypeError(f"cannot serialize {type(obj)!r}")


def to_jsonable(obj):
    """Recursively convert dataclasses / numpy values into plain JSON-ready types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


@dataclass(frozen=True)
class OrbitDocument:
    """Serializable record of a detected periodic orbit."""

    mu: float
    jacobi: float
    period: float
    closure_residual: float
    samples: np.ndarray  # rows of (t, y1, y2, v1, v2)
    provenance: str = ""
    schema_version: str = ORBIT_SCHEMA_VERSION

    @classmethod
    def from_orbit(cls, orbit, provenance: str = "", n_samples: int = 512) -> "OrbitDocument":
        ts, states = orbit.sample(n_samples, endpoint=True)
        samples = np.column_stack([ts, states])
        return cls(
            mu=orbit.mu,
            jacobi=orbit.c,
            period=orbit.period,
            closure_residual=orbit.closure_residual,
            samples=samples,
            provenance=provenance,
        )

    def validate(self) -> None:
        if self.schema_version != ORBIT_SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {self.schema_version!r}")
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 5 or samples.shape[0] < 2:
            raise SchemaError("samples must be an (n, 5) array of [t, y1, y2, v1, v2] rows")
        if not np.all(np.isfinite(samples)):
            raise SchemaError("samples contain non-finite values")
        if np.any(np.diff(samples[:, 0]) <= 0.0):
            raise SchemaError("sample times must be strictly increasing")
        if not (0.0 < self.mu <= 0.5):
            raise SchemaError(f"mu = {self.mu} outside (0, 1/2]")
        if self.period <= 0.0:
            raise SchemaError("period must be positive")
        jac = dynamics.jacobi_values(samples[:, 1:], self.mu)
        worst = float(np.max(np.abs(jac - self.jacobi)))
        if worst > _JACOBI_SAMPLE_TOLERANCE:
            raise SchemaError(
                f"samples violate the stated Jacobi constant by {worst:.3e} (> {_JACOBI_SAMPLE_TOLERANCE})"
            )

    def initial_state(self) -> dynamics.RotatingState:
        row = np.asarray(self.samples, dtype=float)[0]
        return dynamics.RotatingState(row[1], row[2], row[3], row[4], t=row[0])

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "mu": self.mu,
            "jacobi": self.jacobi,
            "period": self.period,
            "closure_residual": self.closure_residual,
            "provenance": self.provenance,
            "samples": [list(row) for row in np.asarray(self.samples, dtype=float)],
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict()) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_dict(cls, data: dict) -> "OrbitDocument":
        if not isinstance(data, dict):
            raise SchemaError("orbit document must be a JSON object")
        required = {"schema_version", "mu", "jacobi", "period", "closure_residual", "samples"}
        missing = required - set(data)
        if missing:
            raise SchemaError(f"orbit document missing fields: {sorted(missing)}")
        try:
            doc = cls(
                mu=float(data["mu"]),
                jacobi=float(data["jacobi"]),
                period=float(data["period"]),
                closure_residual=float(data["closure_residual"]),
                samples=np.asarray(data["samples"], dtype=float),
                provenance=str(data.get("provenance", "")),
                schema_version=str(data["schema_version"]),
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"malformed orbit document: {exc}") from exc
        doc.validate()
        return doc

    @classmethod
    def read(cls, path) -> "OrbitDocument":
        import json

        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def write_trajectory_csv(path, ts, states) -> None:
    """CSV dump with the header t,y1,y2,v1,v2."""
    ts = np.asarray(ts, dtype=float)
    states = np.asarray(states, dtype=float)
    with open(path, "w") as fh:
        fh.write("t,y1,y2,v1,v2\n")
        for t, row in zip(ts, states):
            fields = [t, row[0], row[1], row[2], row[3]]
            fh.write(",".join(_format_float(float(v)) for v in fields) + "\n")


def write_polyline_csv(path, polyline) -> None:
    """CSV dump of a closed polyline with the header t,y1,y2 (t blank when unknown)."""
    times = polyline.times
    with open(path, "w") as fh:
        fh.write("t,y1,y2\n")
        for i, (x, y) in enumerate(polyline.vertices):
            t = "" if times is None else _format_float(float(times[i]))
            fh.write(f"{t},{_format_float(float(x))},{_format_float(float(y))}\n")
