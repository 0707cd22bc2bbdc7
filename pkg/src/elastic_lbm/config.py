"""Run configuration: a line-oriented ``key = value`` format with sections.

Example::

    [grid]
    nx = 128
    ny = 128

    [material]
    nu = 0.1

    [run]
    experiment = bulk-compare
    n_steps = 70

Blank lines and lines starting with ``#`` or ``;`` are ignored.  Every
problem found (syntax or semantic) is collected before reporting.
"""

from dataclasses import asdict, dataclass, field

from .boundaries import ABSORBING, FREE, KINDS, PERIODIC, RIGID, BoundarySpec, EdgeSpec
from .core import NU_LIMIT, MaterialParams
from .sources import SourceSpec

EXPERIMENTS = ("simulate", "bulk-compare", "stability-map", "convergence", "reflection", "rayleigh")


class ConfigError(ValueError):
    """Raised with the full list of problems in ``errors``."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


def _floats(n):
    def conv(text):
        parts = [p for p in text.replace(",", " ").split()]
        if len(parts) != n:
            raise ValueError(f"expected {n} numbers")
        return tuple(float(p) for p in parts)
    return conv


def _int_list(text):
    return [int(p) for p in text.replace(",", " ").split()]


def _stations(text):
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            x, y = _floats(2)(chunk)
            if x != int(x) or y != int(y):
                raise ValueError("station coordinates must be integers")
            out.append((int(x), int(y)))
    return out


def _choice(options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return conv


# section -> key -> converter
SCHEMA = {
    "grid": {"nx": int, "ny": int},
    "material": {"nu": float, "tau": float, "rho0": float},
    "source": {
        "x": float, "y": float, "sigma": float, "direction": _floats(2),
        "amplitude": float, "period": float, "t0": float,
    },
    "boundary": {
        "left": _choice(KINDS), "right": _choice(KINDS),
        "bottom": _choice(KINDS), "top": _choice(KINDS),
        "thickness": int, "a_max": float, "profile": float, "extrapolation": float,
    },
    "run": {
        "experiment": _choice(EXPERIMENTS), "n_steps": int, "snapshot_every": int,
        "stations": _stations,
    },
    "convergence": {"sizes": _int_list},
    "stability": {"k_points": int},
    "rayleigh": {"switch_step": int, "turns": int, "profile_step": int, "depth": float},
    "reflection": {"wall": _choice((RIGID, FREE))},
}


def experiment_defaults(kind):
    """Flat ``section.key -> value`` defaults for one experiment kind."""
    d = {
        "grid.nx": 128, "grid.ny": 128,
        "material.nu": 0.25, "material.tau": 0.55, "material.rho0": 1.0,
        "source.sigma": 4.0, "source.direction": (1.0, 0.0), "source.amplitude": 1e-3,
        "source.period": 20.0,
        "boundary.left": PERIODIC, "boundary.right": PERIODIC,
        "boundary.bottom": PERIODIC, "boundary.top": PERIODIC,
        "boundary.thickness": 30, "boundary.a_max": 0.1, "boundary.profile": 2.0,
        "boundary.extrapolation": 0.0,
        "run.experiment": kind, "run.n_steps": 70, "run.snapshot_every": 0, "run.stations": [],
        "convergence.sizes": [64, 128, 256, 512],
        "stability.k_points": 64,
        "rayleigh.switch_step": 400, "rayleigh.turns": 2, "rayleigh.profile_step": 1800,
        "rayleigh.depth": 5.0,
        "reflection.wall": RIGID,
    }
    if kind == "rayleigh":
        d.update({
            "grid.nx": 300, "grid.ny": 100, "source.sigma": 8.0, "source.period": 40.0,
            "source.direction": (0.0, 1.0), "source.x": 45.0,
            "boundary.left": ABSORBING, "boundary.right": ABSORBING,
            "boundary.bottom": ABSORBING, "boundary.top": FREE,
        })
    elif kind == "reflection":
        d.update({
            "grid.nx": 160, "grid.ny": 160, "source.direction": (0.0, 1.0),
            "boundary.left": ABSORBING, "boundary.right": ABSORBING,
            "boundary.bottom": RIGID, "boundary.top": ABSORBING,
        })
    return d


@dataclass
class RunConfig:
    experiment: str
    nx: int
    ny: int
    params: MaterialParams
    source: SourceSpec
    boundary: BoundarySpec
    n_steps: int
    snapshot_every: int = 0
    stations: list = field(default_factory=list)
    sizes: list = field(default_factory=lambda: [64, 128, 256, 512])
    k_points: int = 64
    switch_step: int = 400
    turns: int = 2
    profile_step: int = 1800
    wall: str = RIGID

    def to_dict(self):
        """Fully resolved values, suitable for embedding in summaries."""
        d = asdict(self)
        d["params"] = {"nu": self.params.nu, "tau": self.params.tau, "rho0": self.params.rho0,
                       "lambda": self.params.lam, "mu": self.params.mu,
                       "vP": float(self.params.vP), "vS": float(self.params.vS)}
        return d


def _tokenize(text):
    """Yield ``(section, key, value, line_no, value_col)`` or collect syntax errors."""
    entries, errors = [], []
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if not stripped or stripped[0] in "#;":
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                errors.append(f"line {no}, column {len(line) + 1}: expected ']' to close section header")
                section = None
                continue
            section = stripped[1:-1].strip()
            if not section:
                errors.append(f"line {no}, column {indent + 2}: empty section name")
                section = None
            continue
        eq = line.find("=")
        if eq < 0:
            errors.append(f"line {no}, column {indent + 1}: expected 'key = value'")
            continue
        key = line[:eq].strip()
        if not key:
            errors.append(f"line {no}, column {indent + 1}: missing key before '='")
            continue
        value = line[eq + 1:]
        col = eq + 2 + (len(value) - len(value.lstrip()))
        value = value.strip()
        if not value:
            errors.append(f"line {no}, column {eq + 2}: missing value for '{key}'")
            continue
        if section is None:
            errors.append(f"line {no}, column {indent + 1}: key '{key}' outside any [section]")
            continue
        entries.append((section, key, value, no, col))
    return entries, errors


def parse_config(text):
    """Parse and validate; raises :class:`ConfigError` listing every problem."""
    entries, errors = _tokenize(text)
    given = {}
    for section, key, value, no, col in entries:
        name = f"{section}.{key}"
        if section not in SCHEMA:
            errors.append(f"line {no}: unknown section [{section}]")
            continue
        if key not in SCHEMA[section]:
            errors.append(f"line {no}: unknown key '{key}' in [{section}]")
            continue
        if name in given:
            errors.append(f"line {no}: duplicate key '{key}' in [{section}] "
                          f"(first set on line {given[name][1]})")
            continue
        try:
            given[name] = (SCHEMA[section][key](value), no)
        except ValueError as exc:
            errors.append(f"line {no}, column {col}: bad value for '{name}': {exc}")

    kind = given["run.experiment"][0] if "run.experiment" in given else "simulate"
    values = experiment_defaults(kind)
    values.update({k: v for k, (v, _) in given.items()})
    if kind == "reflection" and "boundary.bottom" not in given:
        values["boundary.bottom"] = values["reflection.wall"]
    cfg = None
    errors.extend(_semantic_errors(values))
    if not errors:
        cfg = _build(values)
    if errors:
        raise ConfigError(errors)
    return cfg


def _semantic_errors(v):
    errs = []
    nx, ny = v["grid.nx"], v["grid.ny"]
    if nx < 3 or ny < 3:
        errs.append(f"grid must be at least 3x3, got {nx}x{ny}")
    nu, tau = v["material.nu"], v["material.tau"]
    if not nu < NU_LIMIT:
        errs.append(f"material.nu = {nu} must stay below nu_lim = 5/11 ~ 0.4545: beyond it "
                    "the P-wave speed exceeds what the centred density gradient can carry "
                    "and the scheme is unconditionally unstable")
    elif nu <= -1.0:
        errs.append(f"material.nu = {nu} must exceed -1")
    if tau <= 0.5:
        errs.append(f"material.tau = {tau} must exceed 0.5")
    if v["material.rho0"] <= 0:
        errs.append("material.rho0 must be positive")
    if v["source.sigma"] <= 0:
        errs.append("source.sigma must be positive")
    if v["source.period"] <= 0:
        errs.append("source.period must be positive")
    dx, dy = v["source.direction"]
    if abs((dx * dx + dy * dy) ** 0.5 - 1.0) > 1e-9:
        errs.append("source.direction must be a unit vector")
    if v["run.n_steps"] < 0:
        errs.append("run.n_steps must be non-negative")
    if v["run.snapshot_every"] < 0:
        errs.append("run.snapshot_every must be non-negative")
    for x, y in v["run.stations"]:
        if not (0 <= x < nx and 0 <= y < ny):
            errs.append(f"station ({x}, {y}) lies outside the {nx}x{ny} grid")
    sizes = v["convergence.sizes"]
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])) or min(sizes, default=0) < 8:
        errs.append("convergence.sizes needs >= 3 strictly increasing sizes of at least 8")
    if v["stability.k_points"] < 1:
        errs.append("stability.k_points must be positive")
    if v["rayleigh.turns"] < 1:
        errs.append("rayleigh.turns must be at least 1")
    try:
        _boundary(v).validate(nx, ny)
    except ValueError as exc:
        errs.extend(str(exc).split("; "))
    if v["run.experiment"] in ("bulk-compare", "convergence"):
        if any(v[f"boundary.{e}"] != PERIODIC for e in ("left", "right", "bottom", "top")):
            errs.append(f"experiment {v['run.experiment']} needs periodic edges "
                        "(the spectral oracle is periodic)")
    return errs


def _boundary(v):
    layer = {k: v[f"boundary.{k}"] for k in ("thickness", "a_max", "profile", "extrapolation")}
    return BoundarySpec(*(EdgeSpec(v[f"boundary.{e}"], **layer)
                          for e in ("left", "right", "bottom", "top")))


def _build(v):
    nx, ny = v["grid.nx"], v["grid.ny"]
    x = v.get("source.x", nx / 2)
    if "source.y" in v:
        y = v["source.y"]
    elif v["run.experiment"] == "rayleigh":
        y = ny - 1 - v["rayleigh.depth"]
    elif v["run.experiment"] == "reflection":
        y = 50.0
    else:
        y = ny / 2
    period = v["source.period"]
    source = SourceSpec(center=(x, y), sigma=v["source.sigma"], direction=v["source.direction"],
                        amplitude=v["source.amplitude"], period=period,
                        t0=v.get("source.t0", period))
    params = MaterialParams(nu=v["material.nu"], tau=v["material.tau"], rho0=v["material.rho0"])
    return RunConfig(
        experiment=v["run.experiment"], nx=nx, ny=ny, params=params, source=source,
        boundary=_boundary(v), n_steps=v["run.n_steps"],
        snapshot_every=v["run.snapshot_every"], stations=v["run.stations"],
        sizes=v["convergence.sizes"],
        k_points=v["stability.k_points"], switch_step=v["rayleigh.switch_step"],
        turns=v["rayleigh.turns"], profile_step=v["rayleigh.profile_step"],
        wall=v["reflection.wall"],
    )


def default_config(kind="simulate"):
    return parse_config(f"[run]\nexperiment = {kind}\n")
