"""Declarative experiment configuration (TOML) and validation."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from ..conformal import DiskInclusion
from ..forward import ConcentricConductivity

EXPERIMENTS = ("fig1", "fig3", "discrepancy", "custom")
PRESET_M = (2, 3, 4, 6, 8, 11, 16, 22, 32, 45, 64)


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def width_half_coverage(M: int) -> float:
    """Electrodes cover half the boundary."""
    return math.pi / (2 * M + 1)


def width_inverse_M_squared(M: int) -> float:
    return math.pi / (M * (2 * M + 1))


WIDTH_LAWS = {
    "half-coverage": width_half_coverage,
    "inverse-M-squared": width_inverse_M_squared,
}


@dataclass(frozen=True)
class Checks:
    """Pass/fail gates evaluated in ``--check`` mode; ``None`` disables a gate."""

    slope_window: tuple[int, int] | None = None
    slope_targets: dict[str, float] = field(default_factory=dict)
    slope_tol: float = 0.3
    threshold_err: float = 0.01
    threshold_electrodes: dict[str, int] = field(default_factory=dict)
    threshold_rtol: float = 0.2
    max_err_at_top: float | None = None
    concave: bool = False
    d_slope_target: float | None = None
    d_slope_tol: float = 0.2
    zero_row_tol: float = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    geometry: object
    modes: tuple[int, ...] = (1, 2, 4, 8)
    M_values: tuple[int, ...] = PRESET_M
    model: str = "pem"
    width_laws: tuple[str, ...] = ()
    fixed_width: float | None = None
    z: complex = 1.0
    N: int | None = None
    threshold_scan: bool = False
    d_values: tuple[float, ...] = ()
    d_sweep_M: int = 4
    zero_contrast_row: bool = True
    out_dir: Path = Path("out")
    name: str = ""
    checks: Checks = field(default_factory=Checks)

    @property
    def stem(self) -> str:
        return self.name or self.experiment

    def widths(self) -> list[tuple[str, object]]:
        """``(label, law)`` pairs; a fixed width is a constant law."""
        if self.fixed_width is not None:
            d = self.fixed_width
            return [(f"d={d:g}", lambda M: d)]
        return [(name, WIDTH_LAWS[name]) for name in self.width_laws]


def _geometry(table: dict):
    try:
        kappa = float(table["kappa"])
        if "center" in table:
            re, im = (float(x) for x in table["center"])
            return DiskInclusion(complex(re, im), float(table["radius"]), kappa)
        return ConcentricConductivity(kappa, float(table["R"]))
    except KeyError as exc:
        raise ConfigError(f"[conductivity] is missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[conductivity]: {exc}") from None


def _ints(values, what: str) -> tuple[int, ...]:
    try:
        out = tuple(int(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a list of integers") from None
    if any(float(a) != float(b) for a, b in zip(out, values)):
        raise ConfigError(f"{what} must be a list of integers")
    return out


def parse_config(data: dict, experiment: str | None = None) -> ExperimentConfig:
    """Build and validate a configuration from a parsed TOML document."""
    exp = data.get("experiment", experiment)
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}")
    if experiment is not None and exp != experiment:
        raise ConfigError(f"config describes experiment {exp!r} but {experiment!r} was requested")
    if "conductivity" not in data:
        raise ConfigError("missing [conductivity] table")
    geometry = _geometry(data["conductivity"])

    sweep = data.get("sweep", {})
    M_spec = sweep.get("M", "preset")
    M_values = PRESET_M if M_spec == "preset" else _ints(M_spec, "sweep.M")
    modes = _ints(sweep.get("modes", [1, 2, 4, 8]), "sweep.modes")

    el = data.get("electrodes", {})
    laws = el.get("width_law", [])
    laws = (laws,) if isinstance(laws, str) else tuple(laws)
    fixed = el.get("width")
    z = el.get("z", 1.0)
    z = complex(*z) if isinstance(z, list) else complex(z)

    solver = data.get("solver", {})
    out = data.get("output", {})
    disc = data.get("discrepancy", {})
    chk = data.get("check", {})
    window = chk.get("slope_window")
    checks = Checks(
        slope_window=tuple(_ints(window, "check.slope_window")) if window is not None else None,
        slope_targets={str(k): float(v) for k, v in chk.get("slope", {}).items()},
        slope_tol=float(chk.get("slope_tol", 0.3)),
        threshold_err=float(chk.get("threshold_err", 0.01)),
        threshold_electrodes={str(k): int(v) for k, v in chk.get("threshold_electrodes", {}).items()},
        threshold_rtol=float(chk.get("threshold_rtol", 0.2)),
        max_err_at_top=chk.get("max_err_at_top"),
        concave=bool(chk.get("concave", False)),
        d_slope_target=chk.get("d_slope"),
        d_slope_tol=float(chk.get("d_slope_tol", 0.2)),
        zero_row_tol=float(chk.get("zero_row_tol", 1e-12)),
    )
    cfg = ExperimentConfig(
        experiment=exp,
        geometry=geometry,
        modes=modes,
        M_values=M_values,
        model=str(data.get("model", "cem" if exp == "fig1" else "pem")),
        width_laws=laws,
        fixed_width=None if fixed is None else float(fixed),
        z=z,
        N=solver.get("N"),
        threshold_scan=bool(sweep.get("threshold_scan", False)),
        d_values=tuple(float(d) for d in disc.get("widths", [])),
        d_sweep_M=int(disc.get("M", 4)),
        zero_contrast_row=bool(disc.get("zero_contrast_row", True)),
        out_dir=Path(out.get("dir", "out")),
        name=str(out.get("name", "")),
        checks=checks,
    )
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    Ms = cfg.M_values
    if not Ms:
        raise ConfigError("the M range is empty")
    if any(M < 1 for M in Ms) or any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ConfigError("M values must be positive and strictly ascending")
    if not cfg.modes or any(n == 0 for n in cfg.modes):
        raise ConfigError("modes must be a nonempty list of nonzero integers")
    if cfg.model not in ("pem", "cem"):
        raise ConfigError(f"model must be 'pem' or 'cem', got {cfg.model!r}")
    unknown = [w for w in cfg.width_laws if w not in WIDTH_LAWS]
    if unknown:
        raise ConfigError(f"unknown width law(s) {unknown}; known: {sorted(WIDTH_LAWS)}")
    if cfg.width_laws and cfg.fixed_width is not None:
        raise ConfigError("give either electrodes.width_law or electrodes.width, not both")
    if cfg.fixed_width is not None and not cfg.fixed_width > 0:
        raise ConfigError("electrodes.width must be positive")
    if cfg.z.real <= 0:
        raise ConfigError("contact impedance needs a positive real part")
    needs_width = cfg.experiment == "fig1" or (cfg.experiment in ("custom", "discrepancy")
                                               and cfg.model == "cem")
    if needs_width and not cfg.widths():
        raise ConfigError(f"{cfg.experiment} with the CEM needs a width law or a fixed width")
    if cfg.experiment == "fig1" and cfg.model != "cem":
        raise ConfigError("fig1 compares against the CEM; set model = 'cem'")
    if cfg.experiment == "fig3" and cfg.model != "pem":
        raise ConfigError("fig3 uses the point-electrode pipeline; set model = 'pem'")
    if cfg.fixed_width is not None:
        M_max = cfg.d_sweep_M if cfg.experiment == "discrepancy" else max(Ms)
        if cfg.fixed_width >= 2 * math.pi / (2 * M_max + 1):
            raise ConfigError(f"fixed width {cfg.fixed_width} makes electrodes overlap at M={M_max}")
    if cfg.model == "cem" and not isinstance(cfg.geometry, ConcentricConductivity):
        raise ConfigError("the CEM solver needs a concentric conductivity (kappa, R)")
    if cfg.experiment == "discrepancy":
        if not isinstance(cfg.geometry, ConcentricConductivity):
            raise ConfigError("discrepancy needs a concentric conductivity")
        if len(cfg.d_values) < 2:
            raise ConfigError("discrepancy.widths needs at least two values")
        if any(not d > 0 for d in cfg.d_values):
            raise ConfigError("discrepancy.widths must be positive")
        if max(cfg.d_values) >= 2 * math.pi / (2 * cfg.d_sweep_M + 1):
            raise ConfigError("discrepancy.widths overlap at the sweep order M")
    if cfg.N is not None and cfg.model == "cem" and cfg.N < 4 * max(Ms):
        raise ConfigError(f"solver.N={cfg.N} is below 4*max(M)")
    w = cfg.checks.slope_window
    if w is not None and (len(w) != 2 or w[0] >= w[1]):
        raise ConfigError("check.slope_window must be [M_low, M_high] with M_low < M_high")
    labels = {label for label, _ in cfg.widths()} if cfg.model == "cem" else {"pem"}
    stray = (set(cfg.checks.slope_targets) | set(cfg.checks.threshold_electrodes)) - labels
    if stray:
        raise ConfigError(f"check tables name unknown series {sorted(stray)}")


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, experiment)


def with_overrides(cfg: ExperimentConfig, out_dir=None) -> ExperimentConfig:
    return cfg if out_dir is None else replace(cfg, out_dir=Path(out_dir))
