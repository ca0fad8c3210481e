"""
Run configuration: a single JSON document.

Complex numbers are written ``[re, im]`` (plain numbers are read as real);
matrices are row-major nested lists of such entries.  Example::

    {
      "n": 1,
      "interval": {"a": 0, "b": 8},
      "coefficients": {"mode": "random", "rho": 0.5, "instances": 10},
      "lambdas": [[0, 0], [0, 1]],
      "window": {"a": 0, "b": 2},
      "seed": 7
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .system import DEFAULT_TOL, CoefficientField, IntegerInterval, Tolerances, random_field

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "decode_complex",
           "decode_vector", "decode_matrix", "encode_complex"]


class ConfigError(ValueError):
    """The configuration document is malformed."""


def decode_complex(x):
    if isinstance(x, bool):
        raise ConfigError(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise ConfigError(f"complex entries must be numbers or [re, im], got {x!r}")


def decode_vector(v):
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"expected a list, got {v!r}")
    return np.array([decode_complex(x) for x in v], dtype=complex)


def decode_matrix(m):
    if not isinstance(m, (list, tuple)) or not m:
        raise ConfigError(f"expected a non-empty list of rows, got {m!r}")
    rows = [decode_vector(r) for r in m]
    if len({r.size for r in rows}) != 1:
        raise ConfigError("matrix rows have different lengths")
    return np.array(rows)


def encode_complex(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _interval(d, name):
    if not isinstance(d, dict) or "a" not in d or "b" not in d:
        raise ConfigError(f"{name} must be an object with integer keys a and b")
    a, b = d["a"], d["b"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (a, b)):
        raise ConfigError(f"{name} endpoints must be integers")
    try:
        return IntegerInterval(a, b, bool(d.get("truncated", False)))
    except DimensionError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


@dataclass
class RunConfig:
    n: int
    interval: IntegerInterval | None
    coefficients: dict
    lambdas: list
    window: IntegerInterval | None
    c0: int | None
    tol: Tolerances
    seed: int
    halfline: dict = field(default_factory=dict)
    q: dict = field(default_factory=dict)
    qc: dict = field(default_factory=dict)
    solve: dict = field(default_factory=dict)
    bvp: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @property
    def instances(self):
        if self.coefficients.get("mode") == "random":
            return int(self.coefficients.get("instances", 1))
        return 1

    def fields(self):
        """Coefficient fields described by the config (one per instance)."""
        if self.interval is None:
            raise ConfigError("this command needs an interval")
        opts = self.coefficients
        mode = opts.get("mode", "constant")
        n, iv = self.n, self.interval
        if mode == "random":
            rho = float(opts.get("rho", 0.5))
            if not 0 <= rho < 1:
                raise ConfigError("random mode needs 0 <= rho < 1")
            rng = np.random.default_rng(self.seed)
            return [
                random_field(n, iv, rng, rho=rho, scale=float(opts.get("scale", 0.4)),
                             hermitian=bool(opts.get("hermitian", False)),
                             weight_spread=float(opts.get("weight_spread", 0.3)))
                for _ in range(self.instances)
            ]
        blocks = {}
        for name in ("A", "B", "C", "D", "W1", "W2"):
            default = np.eye(n) if name.startswith("W") else np.zeros((n, n))
            val = opts.get(name)
            if val is None:
                blocks[name] = default
            elif mode == "constant":
                blocks[name] = decode_matrix(val)
            elif mode == "per_site":
                if not isinstance(val, list):
                    raise ConfigError(f"per_site block {name} must be a list of matrices")
                blocks[name] = np.array([decode_matrix(m) for m in val])
            else:
                raise ConfigError(f"unknown coefficient mode {mode!r}")
        return [CoefficientField(n, iv, **blocks, weight_atol=self.tol.weight_atol)]


def parse_config(doc):
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("the configuration must be a JSON object")
    n = doc.get("n", 1)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("n must be a positive integer")
    interval = _interval(doc["interval"], "interval") if "interval" in doc else None
    window = _interval(doc["window"], "window") if "window" in doc else None
    coeffs = doc.get("coefficients", {"mode": "constant"})
    if not isinstance(coeffs, dict):
        raise ConfigError("coefficients must be an object")
    lambdas = [decode_complex(x) for x in doc.get("lambdas", [[0, 0], [0, 1]])]
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        raise ConfigError("tolerances must be an object")
    try:
        tol = DEFAULT_TOL.replace(**tol_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad tolerances: {exc}") from exc
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    c0 = doc.get("c0")
    if c0 is not None and (not isinstance(c0, int) or isinstance(c0, bool)):
        raise ConfigError("c0 must be an integer")
    sections = {}
    for key in ("halfline", "q", "qc", "solve", "bvp", "output"):
        val = doc.get(key, {})
        if not isinstance(val, dict):
            raise ConfigError(f"{key} must be an object")
        sections[key] = val
    return RunConfig(n, interval, coeffs, lambdas, window, c0, tol, seed, **sections)


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(doc)
