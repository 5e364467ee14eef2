"""Run configuration for the rinzelkit CLI."""

import json
import logging
import math
import os
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from rinzelkit.analysis.scan import ScanAxis
from rinzelkit.errors import ConfigError
from rinzelkit.model.params import PARAM_KEYS, FhrParams, State
from rinzelkit.pde.grid import Boundary
from rinzelkit.solvers.integrator import IntegratorConfig

TOP_LEVEL_SCALARS = ("t_final", "t_start", "form")

SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    "params": PARAM_KEYS,
    "initial_state": ("u", "w", "y"),
    "integrator": (
        "method", "abs_tol", "rel_tol", "h_init", "h_min", "h_max", "max_steps", "event_tol", "adaptive",
    ),
    "certificate": ("eps1", "K0", "E0", "optimize_eps1"),
    "scan": ("x", "y", "eps1"),
    "first_integral": (
        "Q1", "Q2", "u0", "t_final", "samples", "constraint_tol", "sweep", "full_system",
    ),
    "kernel": ("x", "t", "tol", "max_subdivisions"),
    "picard": (
        "L", "nx", "nt", "T", "tol", "max_sweeps", "quadrature_order", "u0", "w0", "y0", "crosscheck", "boundary",
    ),
}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "certificate": {"eps1": 0.0, "K0": 1.0, "E0": None, "optimize_eps1": False},
    "scan": {"y": None, "eps1": 0.0},
    "first_integral": {
        "Q1": None, "Q2": None, "u0": 1.0, "t_final": 100.0, "samples": 1001,
        "constraint_tol": 1e-12, "sweep": {"start": -0.6, "stop": 0.2, "num": 9}, "full_system": False,
    },
    "kernel": {"tol": 1e-10, "max_subdivisions": 200},
    "picard": {
        "L": 10.0, "nx": 401, "nt": 50, "T": 0.25, "tol": 1e-10, "max_sweeps": 50, "quadrature_order": 40,
        "u0": {"amplitude": 0.5, "center": 0.0, "width": 1.0}, "w0": 0.0, "y0": 0.0,
        "crosscheck": False, "boundary": "zero_flux",
    },
}

RANGE_KEYS = ("start", "stop", "num")
GAUSSIAN_KEYS = ("amplitude", "center", "width")


def parse_override(item: str) -> Tuple[Tuple[str, ...], Any]:
    """Split ``key=value`` into a key path and a JSON-decoded value.

    Bare keys address ``params`` unless they name a top-level scalar
    (``t_final``, ``t_start``, ``form``); dotted keys address sections. Values
    that are not valid JSON are kept as strings.
    """
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"Override {item!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = tuple(key.split("."))
    if len(parts) == 1 and parts[0] not in TOP_LEVEL_SCALARS:
        parts = ("params",) + parts
    return parts, value


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Return a copy of ``data`` with every ``key=value`` override applied in order."""
    out = deepcopy(data)
    for item in overrides:
        path, value = parse_override(item)
        node = out
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Override {item!r}: {part!r} is not a section")
            node = child
        node[path[-1]] = value
    return out


def _number(section: str, key: str, value: Any, problems: List[str], positive: bool = False) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        problems.append(f"{section}.{key} must be a finite number (got {value!r})")
        return None
    if positive and not value > 0:
        problems.append(f"{section}.{key} must be > 0 (got {value!r})")
        return None
    return float(value)


def _integer(section: str, key: str, value: Any, problems: List[str], minimum: int = 1) -> Optional[int]:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        problems.append(f"{section}.{key} must be an integer >= {minimum} (got {value!r})")
        return None
    return value


def _flag(section: str, key: str, value: Any, problems: List[str]) -> bool:
    if not isinstance(value, bool):
        problems.append(f"{section}.{key} must be true or false (got {value!r})")
        return False
    return value


def _range(section: str, key: str, value: Any, problems: List[str]) -> Optional[Dict[str, float]]:
    if not isinstance(value, Mapping):
        problems.append(f"{section}.{key} must be an object with keys {', '.join(RANGE_KEYS)}")
        return None
    unknown = sorted(set(value) - set(RANGE_KEYS))
    missing = [k for k in RANGE_KEYS if k not in value]
    if unknown or missing:
        problems.append(f"{section}.{key}: unknown keys {unknown}, missing keys {missing}")
        return None
    start = _number(section, f"{key}.start", value["start"], problems)
    stop = _number(section, f"{key}.stop", value["stop"], problems)
    num = _integer(section, f"{key}.num", value["num"], problems)
    if None in (start, stop, num):
        return None
    if num > 1 and not stop > start:
        problems.append(f"{section}.{key}: need start < stop for more than one point")
        return None
    return {"start": start, "stop": stop, "num": num}


class Config:
    """Validated run configuration.

    Sections that are absent stay ``None`` (or take their defaults); commands
    state what they need with ``require``.
    """

    def __init__(self, data: Mapping[str, Any], source: Optional[Path] = None):
        self.source = source
        self.raw = dict(data)
        unknown = sorted(set(data) - set(SECTION_KEYS) - set(TOP_LEVEL_SCALARS))
        if unknown:
            raise ConfigError(
                f"Unknown config keys: {', '.join(unknown)} "
                f"(allowed: {', '.join(sorted(set(SECTION_KEYS) | set(TOP_LEVEL_SCALARS)))})"
            )
        problems: List[str] = []
        for section, allowed in SECTION_KEYS.items():
            body = data.get(section)
            if body is None:
                continue
            if not isinstance(body, Mapping):
                problems.append(f"{section} must be an object")
                continue
            extra = sorted(set(body) - set(allowed))
            if extra:
                problems.append(f"unknown {section} keys: {', '.join(extra)}")
        if problems:
            raise ConfigError("Invalid configuration: " + "; ".join(problems))

        self.params: Optional[FhrParams] = (
            FhrParams.from_mapping(data["params"]) if data.get("params") is not None else None
        )
        self.initial_state: Optional[State] = (
            State.from_mapping(data["initial_state"]) if data.get("initial_state") is not None else None
        )
        self.integrator = IntegratorConfig.from_mapping(data.get("integrator") or {})

        self.t_final: Optional[float] = None
        if "t_final" in data:
            self.t_final = _number("config", "t_final", data["t_final"], problems, positive=True)
        self.t_start = _number("config", "t_start", data.get("t_start", 0.0), problems) or 0.0
        self.form = data.get("form", "general")
        if self.form not in ("general", "classic"):
            problems.append(f"form must be 'general' or 'classic' (got {self.form!r})")

        self.certificate = self._section("certificate", data)
        self.scan = self._section("scan", data)
        self.first_integral = self._section("first_integral", data)
        self.kernel = self._section("kernel", data)
        self.picard = self._section("picard", data)
        self._check_certificate(problems)
        self._check_scan(problems)
        self._check_first_integral(problems)
        self._check_kernel(problems)
        self._check_picard(problems)
        if problems:
            raise ConfigError("Invalid configuration: " + "; ".join(problems))

    @staticmethod
    def _section(name: str, data: Mapping[str, Any]) -> Dict[str, Any]:
        merged = deepcopy(DEFAULTS.get(name, {}))
        merged.update(data.get(name) or {})
        return merged

    def _check_certificate(self, problems: List[str]) -> None:
        cert = self.certificate
        cert["eps1"] = _number("certificate", "eps1", cert["eps1"], problems)
        cert["K0"] = _number("certificate", "K0", cert["K0"], problems, positive=True)
        if cert["E0"] is not None:
            cert["E0"] = _number("certificate", "E0", cert["E0"], problems)
            if cert["E0"] is not None and cert["E0"] < 0:
                problems.append(f"certificate.E0 must be >= 0 (got {cert['E0']!r})")
                cert["E0"] = None
        cert["optimize_eps1"] = _flag("certificate", "optimize_eps1", cert["optimize_eps1"], problems)

    def _check_scan(self, problems: List[str]) -> None:
        scan = self.scan
        scan["eps1"] = _number("scan", "eps1", scan["eps1"], problems)
        for key in ("x", "y"):
            if scan.get(key) is None:
                continue
            try:
                scan[key] = ScanAxis.from_mapping(scan[key])
            except (ConfigError, TypeError, ValueError) as exc:
                problems.append(f"scan.{key}: {exc}")
                scan[key] = None

    def _check_first_integral(self, problems: List[str]) -> None:
        fi = self.first_integral
        for key in ("Q1", "Q2"):
            if fi[key] is not None:
                fi[key] = _number("first_integral", key, fi[key], problems)
        fi["u0"] = _number("first_integral", "u0", fi["u0"], problems)
        fi["t_final"] = _number("first_integral", "t_final", fi["t_final"], problems, positive=True)
        fi["samples"] = _integer("first_integral", "samples", fi["samples"], problems, minimum=2)
        fi["constraint_tol"] = _number("first_integral", "constraint_tol", fi["constraint_tol"], problems,
                                       positive=True)
        if fi["sweep"] is not None:
            fi["sweep"] = _range("first_integral", "sweep", fi["sweep"], problems)
        fi["full_system"] = _flag("first_integral", "full_system", fi["full_system"], problems)
        if (fi["Q1"] is None) != (fi["Q2"] is None):
            problems.append("first_integral: give both Q1 and Q2 or neither")

    def _check_kernel(self, problems: List[str]) -> None:
        kernel = self.kernel
        for key in ("x", "t"):
            if kernel.get(key) is not None:
                kernel[key] = _range("kernel", key, kernel[key], problems)
        kernel["tol"] = _number("kernel", "tol", kernel["tol"], problems, positive=True)
        kernel["max_subdivisions"] = _integer("kernel", "max_subdivisions", kernel["max_subdivisions"], problems)

    def _check_picard(self, problems: List[str]) -> None:
        pic = self.picard
        for key in ("L", "T", "tol"):
            pic[key] = _number("picard", key, pic[key], problems, positive=True)
        pic["nx"] = _integer("picard", "nx", pic["nx"], problems, minimum=3)
        for key in ("nt", "max_sweeps", "quadrature_order"):
            pic[key] = _integer("picard", key, pic[key], problems)
        for key in ("w0", "y0"):
            pic[key] = _number("picard", key, pic[key], problems)
        pic["crosscheck"] = _flag("picard", "crosscheck", pic["crosscheck"], problems)
        try:
            pic["boundary"] = Boundary(pic["boundary"])
        except ValueError:
            problems.append(
                f"picard.boundary must be one of {', '.join(b.value for b in Boundary)} (got {pic['boundary']!r})"
            )
        u0 = pic["u0"]
        if not isinstance(u0, Mapping) or sorted(u0) != sorted(GAUSSIAN_KEYS):
            problems.append(f"picard.u0 must be an object with exactly the keys {', '.join(GAUSSIAN_KEYS)}")
            return
        pic["u0"] = {key: _number("picard", f"u0.{key}", u0[key], problems) for key in GAUSSIAN_KEYS}
        if pic["u0"]["width"] is not None and not pic["u0"]["width"] > 0:
            problems.append("picard.u0.width must be > 0")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], overrides: Sequence[str] = ()) -> "Config":
        return cls(apply_overrides(dict(data), overrides))

    @classmethod
    def from_file(cls, path: Optional[os.PathLike], overrides: Sequence[str] = ()) -> "Config":
        """Load a JSON run configuration and apply ``--set`` overrides.

        ``path`` may be None; the configuration is then built from the
        overrides alone.

        Raises:
            ConfigError: unreadable file, invalid JSON, unknown or invalid keys.
        """
        data: Dict[str, Any] = {}
        source = None
        if path is not None:
            source = Path(path)
            try:
                data = json.loads(source.read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"Cannot read config file {source}: {exc.strerror or exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"Config file {source} is not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError(f"Config file {source} must contain a JSON object")
        config = cls(apply_overrides(data, overrides), source=source)
        return config

    def require(self, *keys: str) -> None:
        """Raise ConfigError naming every listed top-level key that is absent."""
        missing = [key for key in keys if getattr(self, key, None) is None]
        if missing:
            raise ConfigError(f"Missing required config keys: {', '.join(missing)}")

    def setup_logging(self) -> None:
        """Configure logging for the application."""
        log_level = os.getenv("LOG_LEVEL", "INFO").upper()

        logging.basicConfig(
            level=getattr(logging, log_level, logging.INFO),
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

        # Reduce noise from third-party libraries
        for name in ("matplotlib", "numba"):
            logging.getLogger(name).setLevel(logging.WARNING)

    def __repr__(self) -> str:
        sections = [name for name in SECTION_KEYS if self.raw.get(name) is not None]
        return (
            f"Config(source={str(self.source) if self.source else None!r}, "
            f"sections={sections}, "
            f"a={self.params.a if self.params else None}, "
            f"t_final={self.t_final}, "
            f"method={self.integrator.method.value})"
        )
