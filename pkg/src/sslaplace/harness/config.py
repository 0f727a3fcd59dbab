"""Problem configuration: one JSON document per run, ``"schema": 1``.

Recognised keys (all but ``geometry`` and ``boundary`` optional)::

    schema          1
    geometry        {"kind": "circle", "radius": 1.0, "center": [0, 0]}
                    {"kind": "fourier-radial", "a0": 1.0, "coefficients": [[k, a_k, b_k], ...], "center": [0, 0]}
                    {"kind": "sphere", "n_lat": 40, "n_lon": 80}
    boundary        {"kind": "trig", "a0": 0.0, "terms": [[k, a_k, b_k], ...]}
                    {"kind": "preset", "name": "sin2theta"}
                    {"kind": "spherical-harmonic", "terms": [[l, m, c_lm], ...]}
    N               mesh size for curves (default 512)
    N_sweep         ascending list of >= 3 mesh sizes (convergence); n_lat for the sphere
    solvers         "singular_source" | "classical_bem" | "both" | list of names
    calibration     {"mode": "least_squares"} or {"mode": "two_point", "a": i, "b": j}
    density_route   "spectral" | "finite_difference"
    bem_self_term   "corrected" | "flat"
    kernel_sign     +1 (lap G = delta) or -1
    grid            {"bounds": [x0, x1, y0, y1], "step": h, "delta": null, "plane": "xz", "offset": 0}
    samples         {"count": 2000, "seed": 0, "radius_fraction": 0.8}
    modes           list of k >= 1 (calibration-scan)
    timing_repeats  best-of repeats for the evaluation timing (default 5)
    out_dir         default output directory (the CLI flag wins)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..boundary_calculus import SphericalHarmonicField, TrigSeries
from ..geometry import GridSpec, ParametricCurve, make_circle, make_fourier_curve

SCHEMA_VERSION = 1
SOLVER_NAMES = ("singular_source", "classical_bem")

_TOP_KEYS = {
    "schema", "geometry", "boundary", "N", "N_sweep", "solvers", "calibration",
    "density_route", "bem_self_term", "kernel_sign", "grid", "samples", "modes",
    "timing_repeats", "out_dir", "description",
}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str, line: int | None = None):
        super().__init__(field_name, message)
        self.field = field_name
        self.message = message
        self.line = line

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"config error: {where}{self.field}: {self.message}"


@dataclass(frozen=True)
class SampleSpec:
    count: int = 2000
    seed: int = 0
    radius_fraction: float = 0.8


@dataclass(frozen=True)
class ProblemConfig:
    geometry: dict
    curve: ParametricCurve | None
    sphere_resolution: tuple[int, int] | None
    boundary: TrigSeries | SphericalHarmonicField
    n: int = 512
    n_sweep: tuple[int, ...] = ()
    solvers: tuple[str, ...] = ("singular_source",)
    calibration: str = "least_squares"
    pair: tuple[int, int] | None = None
    density_route: str = "spectral"
    bem_self_term: str = "corrected"
    kernel_sign: int = 1
    grid: GridSpec | None = None
    grid_delta: float | None = None
    samples: SampleSpec = field(default_factory=SampleSpec)
    modes: tuple[int, ...] = ()
    timing_repeats: int = 5
    out_dir: str | None = None

    @property
    def is_sphere(self) -> bool:
        return self.curve is None


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return obj[key]


def _number(value, name: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(name, f"must be positive, got {value!r}")
    return float(value)


def _integer(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value}")
    return value


def _point(value, name: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(name, f"expected [x, y], got {value!r}")
    return (_number(value[0], f"{name}[0]"), _number(value[1], f"{name}[1]"))


def _triples(value, name: str) -> list[tuple]:
    if not isinstance(value, list):
        raise ConfigError(name, f"expected a list of triples, got {value!r}")
    out = []
    for i, entry in enumerate(value):
        if not isinstance(entry, list) or len(entry) != 3:
            raise ConfigError(f"{name}[{i}]", f"expected a triple, got {entry!r}")
        out.append((
            _integer(entry[0], f"{name}[{i}][0]"),
            _number(entry[1], f"{name}[{i}][1]"),
            _number(entry[2], f"{name}[{i}][2]"),
        ))
    return out


def _parse_geometry(geo) -> tuple[ParametricCurve | None, tuple[int, int] | None]:
    if not isinstance(geo, dict):
        raise ConfigError("geometry", f"expected an object, got {geo!r}")
    kind = _require(geo, "kind", "geometry")
    try:
        if kind == "circle":
            center = _point(geo.get("center", [0.0, 0.0]), "geometry.center")
            return make_circle(_number(geo.get("radius", 1.0), "geometry.radius", positive=True), center), None
        if kind == "fourier-radial":
            center = _point(geo.get("center", [0.0, 0.0]), "geometry.center")
            coeffs = _triples(geo.get("coefficients", []), "geometry.coefficients")
            return make_fourier_curve(_number(_require(geo, "a0", "geometry"), "geometry.a0"), coeffs, center), None
        if kind == "sphere":
            n_lat = _integer(geo.get("n_lat", 40), "geometry.n_lat", 4)
            n_lon = _integer(geo.get("n_lon", 2 * n_lat), "geometry.n_lon", 8)
            return None, (n_lat, n_lon)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("geometry", str(exc)) from None
    raise ConfigError("geometry.kind", f"unknown geometry kind {kind!r} (circle | fourier-radial | sphere)")


def _parse_boundary(bnd, sphere: bool):
    if not isinstance(bnd, dict):
        raise ConfigError("boundary", f"expected an object, got {bnd!r}")
    kind = _require(bnd, "kind", "boundary")
    if sphere:
        if kind != "spherical-harmonic":
            raise ConfigError("boundary.kind", "sphere geometry needs a 'spherical-harmonic' boundary function")
        terms = _triples(_require(bnd, "terms", "boundary"), "boundary.terms")
        for i, (l, m, _) in enumerate(terms):
            if l < 0 or m != int(m) or abs(int(m)) > l:
                raise ConfigError(f"boundary.terms[{i}]", f"invalid (l, m) = ({l}, {m})")
        return SphericalHarmonicField.from_terms(terms)
    try:
        if kind == "trig":
            terms = _triples(bnd.get("terms", []), "boundary.terms")
            return TrigSeries(_number(bnd.get("a0", 0.0), "boundary.a0"), tuple(terms))
        if kind == "preset":
            name = _require(bnd, "name", "boundary")
            if not isinstance(name, str):
                raise ConfigError("boundary.name", f"expected a preset name, got {name!r}")
            return TrigSeries.preset(name)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("boundary", str(exc)) from None
    raise ConfigError("boundary.kind", f"unknown boundary kind {kind!r} for a planar curve (trig | preset)")


def _parse_solvers(value) -> tuple[str, ...]:
    if value == "both":
        return SOLVER_NAMES
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ConfigError("solvers", f"expected a solver name or non-empty list, got {value!r}")
    for i, name in enumerate(value):
        if name not in SOLVER_NAMES:
            raise ConfigError(f"solvers[{i}]", f"unknown solver {name!r} (singular_source | classical_bem)")
    return tuple(n for n in SOLVER_NAMES if n in value)


def parse_config(doc: Any) -> ProblemConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(key, "unknown field")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError("schema", f"unsupported schema version {schema!r}; expected {SCHEMA_VERSION}")

    geo = _require(doc, "geometry", "")
    curve, sphere_res = _parse_geometry(geo)
    sphere = curve is None
    boundary = _parse_boundary(_require(doc, "boundary", ""), sphere)

    n = _integer(doc.get("N", 512), "N", 8)
    sweep = doc.get("N_sweep", [])
    if not isinstance(sweep, list):
        raise ConfigError("N_sweep", f"expected a list, got {sweep!r}")
    n_sweep = tuple(_integer(v, f"N_sweep[{i}]", 8) for i, v in enumerate(sweep))

    solvers = _parse_solvers(doc.get("solvers", "singular_source"))
    if sphere and "classical_bem" in solvers:
        raise ConfigError("solvers", "classical_bem is implemented for planar curves only")

    cal = doc.get("calibration", {"mode": "least_squares"})
    if not isinstance(cal, dict):
        raise ConfigError("calibration", f"expected an object, got {cal!r}")
    mode = cal.get("mode", "least_squares")
    pair = None
    if mode == "two_point":
        pair = (_integer(_require(cal, "a", "calibration"), "calibration.a", 0),
                _integer(_require(cal, "b", "calibration"), "calibration.b", 0))
        if pair[0] == pair[1]:
            raise ConfigError("calibration.b", "two-point calibration needs distinct indices")
    elif mode != "least_squares":
        raise ConfigError("calibration.mode", f"unknown calibration mode {mode!r} (least_squares | two_point)")

    route = doc.get("density_route", "spectral")
    if route not in ("spectral", "finite_difference"):
        raise ConfigError("density_route", f"unknown density route {route!r}")
    self_term = doc.get("bem_self_term", "corrected")
    if self_term not in ("corrected", "flat"):
        raise ConfigError("bem_self_term", f"unknown self term {self_term!r} (corrected | flat)")
    sign = doc.get("kernel_sign", 1)
    if sign not in (1, -1) or isinstance(sign, bool):
        raise ConfigError("kernel_sign", f"must be 1 or -1, got {sign!r}")

    grid = None
    grid_delta = None
    if "grid" in doc:
        g = doc["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid", f"expected an object, got {g!r}")
        bounds = _require(g, "bounds", "grid")
        if not isinstance(bounds, list) or len(bounds) != 4:
            raise ConfigError("grid.bounds", f"expected [x0, x1, y0, y1], got {bounds!r}")
        b = tuple(_number(v, f"grid.bounds[{i}]") for i, v in enumerate(bounds))
        if not (b[1] > b[0] and b[3] > b[2]):
            raise ConfigError("grid.bounds", "bounds must be increasing")
        step = _number(_require(g, "step", "grid"), "grid.step", positive=True)
        plane = g.get("plane", "xz")
        if plane not in ("xy", "xz", "yz"):
            raise ConfigError("grid.plane", f"unknown plane {plane!r}")
        grid = GridSpec(b, step, plane, _number(g.get("offset", 0.0), "grid.offset"))
        if g.get("delta") is not None:
            grid_delta = _number(g["delta"], "grid.delta", positive=True)

    s = doc.get("samples", {})
    if not isinstance(s, dict):
        raise ConfigError("samples", f"expected an object, got {s!r}")
    frac = _number(s.get("radius_fraction", 0.8), "samples.radius_fraction", positive=True)
    if frac >= 1.0:
        raise ConfigError("samples.radius_fraction", "must be < 1")
    samples = SampleSpec(
        _integer(s.get("count", 2000), "samples.count", 1),
        _integer(s.get("seed", 0), "samples.seed", 0),
        frac,
    )

    modes = doc.get("modes", [])
    if not isinstance(modes, list):
        raise ConfigError("modes", f"expected a list, got {modes!r}")
    modes = tuple(_integer(k, f"modes[{i}]", 1) for i, k in enumerate(modes))

    out_dir = doc.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("out_dir", f"expected a path string, got {out_dir!r}")

    return ProblemConfig(
        geometry=geo,
        curve=curve,
        sphere_resolution=sphere_res,
        boundary=boundary,
        n=n,
        n_sweep=n_sweep,
        solvers=solvers,
        calibration=mode,
        pair=pair,
        density_route=route,
        bem_self_term=self_term,
        kernel_sign=sign,
        grid=grid,
        grid_delta=grid_delta,
        samples=samples,
        modes=modes,
        timing_repeats=_integer(doc.get("timing_repeats", 5), "timing_repeats", 1),
        out_dir=out_dir,
    )


def load_config(path: str | Path) -> ProblemConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"{exc.msg} (column {exc.colno})", line=exc.lineno) from None
    try:
        return parse_config(doc)
    except ConfigError as exc:
        if exc.line is None:
            exc.line = _locate(text, exc.field)
        raise


def _locate(text: str, field_name: str) -> int | None:
    """Best-effort line number of the last key named in a dotted field path."""
    key = field_name.split(".")[-1].split("[")[0]
    if not key or key.startswith("<"):
        return None
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None
