"""Scenario configuration, execution and serialized outputs.

A config file is flat ``key = value`` text. Keys are parameter names
(``lambda_h``, ``d_h``, ...), initial values (``initial.S_h``, ...), run
settings (``horizon_days``, ``sample_dt``, ``tol``), ``outputs`` (comma
separated), ``name`` and ``preset``. ``#`` starts a comment. Unknown and
repeated keys are errors.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .equilibria import all_equilibria
from .integrate import IntegrationError, Trajectory, integrate
from .model import r0, r0_components, threshold_o, threshold_o0
from .params import (
    COMPARTMENTS,
    ModelParams,
    ParameterError,
    StateVector,
    default_params,
)
from .sensitivity import TARGETS, sensitivity
from .stability import classify

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "DEFAULT_INITIAL",
    "FormulaReport",
    "OUTPUTS",
    "PRESETS",
    "RunResult",
    "ScenarioConfig",
    "analysis_report",
    "load_config",
    "parse_config",
    "preset",
    "preset_digest",
    "read_csv",
    "report_formulas",
    "run",
    "write_csv",
]

CSV_HEADER = "t," + ",".join(COMPARTMENTS)
OUTPUTS = ("timeseries", "r0", "thresholds", "equilibria", "stability", "sensitivity")
RUN_KEYS = ("horizon_days", "sample_dt", "tol")

DEFAULT_INITIAL = StateVector(
    S_h=6000.0,
    E_h=2000.0,
    I_h=1000.0,
    R_h=1000.0,
    m_q=1100.0,
    S_v=300.0,
    E_v=100.0,
    I_v=100.0,
    G=0.0,
)

_LOW_CONTACT = {"a_v": 0.25, "c_vh": 0.2, "c_hv": 0.25}
_HIGH_CONTACT = {"a_v": 3.0425, "c_vh": 1.0, "c_hv": 1.0}

# name -> (parameter overrides, predator seed G0)
PRESETS: dict[str, tuple[dict[str, float], float]] = {
    "fig1a": (_LOW_CONTACT, 0.0),
    "fig1b": (_LOW_CONTACT, 20.0),
    "fig1c": (_HIGH_CONTACT, 0.0),
    "fig1d": (_HIGH_CONTACT, 20.0),
}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``line`` and ``key`` locate the problem when known."""

    def __init__(
        self, message: str, line: int | None = None, key: str | None = None, source: str = "<config>"
    ):
        where = source
        if line is not None:
            where += f":{line}"
        if key is not None:
            where += f" [{key}]"
        super().__init__(f"{where}: {message}")
        self.reason = message
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams = field(default_factory=ModelParams)
    initial: StateVector = DEFAULT_INITIAL
    horizon_days: float = 500.0
    sample_dt: float = 0.5
    tol: float = 1e-8
    outputs: tuple[str, ...] = OUTPUTS
    name: str = "scenario"
    preset: str | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon_days) and self.horizon_days > 0.0):
            raise ConfigError(f"horizon_days must be > 0, got {self.horizon_days}", key="horizon_days")
        if not (math.isfinite(self.sample_dt) and self.sample_dt > 0.0):
            raise ConfigError(f"sample_dt must be > 0, got {self.sample_dt}", key="sample_dt")
        if not 1e-12 < self.tol < 1e-2:
            raise ConfigError(f"tol must lie in (1e-12, 1e-2), got {self.tol}", key="tol")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ConfigError(f"unknown output {bad[0]!r}; choose from {', '.join(OUTPUTS)}", key="outputs")
        if not self.name or any(c in self.name for c in "/\\"):
            raise ConfigError(f"name must be a plain file stem, got {self.name!r}", key="name")


def preset(name: str) -> ScenarioConfig:
    """One of the four reference scenarios, 500 days sampled every half day."""
    try:
        overrides, g0 = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}", key="preset") from None
    return ScenarioConfig(
        params=default_params(**overrides),
        initial=DEFAULT_INITIAL.replace(G=g0),
        name=name,
        preset=name,
    )


def _parse_float(raw: str, key: str, line: int, source: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}", line, key, source) from None
    if not math.isfinite(value):
        raise ConfigError(f"value must be finite, got {raw!r}", line, key, source)
    return value


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse config text; an empty text gives the default parameters and initial state."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno, source=source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", lineno, source=source)
        if not value:
            raise ConfigError("missing value after '='", lineno, key, source)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", lineno, key, source)
        entries[key] = (value, lineno)

    base = ScenarioConfig()
    if "preset" in entries:
        value, lineno = entries.pop("preset")
        try:
            base = preset(value)
        except ConfigError as exc:
            raise ConfigError(
                f"unknown preset {value!r}; available: {', '.join(PRESETS)}", lineno, "preset", source
            ) from exc

    param_names = ModelParams.names()
    param_values = base.params.as_dict()
    initial_values = dict(zip(COMPARTMENTS, base.initial))
    settings: dict[str, object] = {
        "horizon_days": base.horizon_days,
        "sample_dt": base.sample_dt,
        "tol": base.tol,
        "outputs": base.outputs,
        "name": base.name,
    }
    for key, (value, lineno) in entries.items():
        if key in param_names:
            param_values[key] = _parse_float(value, key, lineno, source)
        elif key.startswith("initial."):
            comp = key[len("initial.") :]
            if comp not in initial_values:
                raise ConfigError(
                    f"unknown compartment {comp!r}; expected one of {', '.join(COMPARTMENTS)}",
                    lineno,
                    key,
                    source,
                )
            initial_values[comp] = _parse_float(value, key, lineno, source)
        elif key in RUN_KEYS:
            settings[key] = _parse_float(value, key, lineno, source)
        elif key == "outputs":
            settings[key] = tuple(item.strip() for item in value.split(",") if item.strip())
        elif key == "name":
            settings[key] = value
        else:
            raise ConfigError("unknown key", lineno, key, source)

    def line_of(key: str) -> int | None:
        return entries[key][1] if key in entries else None

    try:
        params = ModelParams(**param_values)
    except ParameterError as exc:
        key = next((k for k in param_names if k in entries and f" {k} " in f" {exc} "), None)
        raise ConfigError(str(exc), line_of(key) if key else None, key, source) from exc
    try:
        initial = StateVector(**initial_values)
    except ValueError as exc:
        key = next((f"initial.{c}" for c in COMPARTMENTS if f" {c} " in f" {exc} "), None)
        raise ConfigError(str(exc), line_of(key) if key else None, key, source) from exc
    try:
        return ScenarioConfig(params=params, initial=initial, preset=base.preset, **settings)
    except ConfigError as exc:
        raise ConfigError(exc.reason, line_of(exc.key), exc.key, source) from exc


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=str(path)) from exc
    return parse_config(text, source=str(path))


def preset_digest(config: ScenarioConfig) -> str:
    """SHA-256 over the parameters, initial state and run settings, in a canonical text form."""
    lines = [f"{k}={v!r}" for k, v in config.params.as_dict().items()]
    lines += [f"initial.{c}={v!r}" for c, v in zip(COMPARTMENTS, config.initial)]
    lines += [f"{k}={getattr(config, k)!r}" for k in RUN_KEYS]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


# ---------------------------------------------------------------- CSV


def write_csv(path, times: np.ndarray, y: np.ndarray) -> None:
    """Write samples with 17 significant digits so every double round-trips exactly."""
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for t, row in zip(times.tolist(), y.tolist()):
            fh.write(",".join(format(v, ".17g") for v in [t, *row]) + "\n")


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_csv`: returns ``(times, y)`` with ``y`` of shape ``(n, 9)``."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, len(COMPARTMENTS) + 1)
    return data[:, 0].copy(), data[:, 1:].copy()


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class FormulaReport:
    free: tuple[str, ...]
    coefficient: float
    text: str


_FREE_EXPONENT = {"a_v": 1.0, "c_vh": 0.5, "c_hv": 0.5}


def report_formulas(params: ModelParams, free=("a_v", "c_vh", "c_hv")) -> FormulaReport:
    """R0 written as a coefficient times the designated free parameters.

    R0 is proportional to ``a_v * sqrt(c_vh * c_hv)``, so any subset of
    ``{a_v, c_vh, c_hv}`` can be factored out exactly.
    """
    free = tuple(dict.fromkeys(free))
    bad = [name for name in free if name not in _FREE_EXPONENT]
    if bad:
        raise ValueError(f"cannot factor {bad[0]!r} out of R0; supported: {', '.join(_FREE_EXPONENT)}")
    coefficient = r0(params.replace(**{name: 1.0 for name in free}))
    if not free:
        return FormulaReport(free, coefficient, f"R0 = {coefficient:.6g}")
    linear = [n for n in free if _FREE_EXPONENT[n] == 1.0]
    rooted = [n for n in free if _FREE_EXPONENT[n] == 0.5]
    factors = linear + ([f"sqrt({' * '.join(rooted)})"] if rooted else [])
    return FormulaReport(free, coefficient, f"R0 = {coefficient:.6g} * " + " * ".join(factors))


def _fmt(v: float) -> str:
    return format(v, ".10g")


def analysis_report(config: ScenarioConfig) -> str:
    """Plain-text report of the sections selected in ``config.outputs``."""
    P = config.params
    wanted = set(config.outputs)
    out = [f"scenario: {config.name}", f"preset: {config.preset or '-'}"]
    if "r0" in wanted:
        comp = r0_components(P)
        out += [
            "",
            "[r0]",
            f"R0 = {_fmt(comp.value)}",
            f"R0h = {_fmt(comp.host)}",
            f"R0v = {_fmt(comp.vector)}",
        ]
        out.append(report_formulas(P).text)
    if "thresholds" in wanted:
        out += ["", "[thresholds]", f"O_0 = {_fmt(threshold_o0(P))}", f"O = {_fmt(threshold_o(P))}"]
    if wanted & {"equilibria", "stability"}:
        points = all_equilibria(P)
    if "equilibria" in wanted:
        out += ["", "[equilibria]"]
        for eq in points:
            verdict = "exists" if eq.exists else "does not exist"
            out.append(f"{eq.kind}: {verdict}")
            for name, value, bound in eq.existence_reasons:
                out.append(f"  {name} = {_fmt(value)} (threshold {_fmt(bound)})")
            if eq.state is not None:
                out.append("  state = " + ", ".join(f"{c}={_fmt(v)}" for c, v in zip(COMPARTMENTS, eq.state)))
                out.append(f"  residual = {eq.residual:.3e}")
    if "stability" in wanted:
        out += ["", "[stability]"]
        for eq in points:
            if not eq.exists:
                out.append(f"{eq.kind}: n/a")
                continue
            rep = classify(eq, P)
            line = f"{eq.kind}: {rep.classification} (max Re = {rep.max_real_part:.6g})"
            if rep.predicted is not None:
                line += f"; conditions predict {rep.predicted}"
            out.append(line)
            out.extend(f"  {note}" for note in rep.notes)
    if "sensitivity" in wanted:
        for target in TARGETS:
            table = sensitivity(target, P)
            out += ["", f"[sensitivity {target}]"]
            out.extend(f"{name} = {_fmt(v)}" for name, v in table.ranked() if v != 0.0)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- run


@dataclass
class RunResult:
    config: ScenarioConfig
    csv_path: Path | None
    report_path: Path | None
    trajectory: Trajectory | None


def default_out_dir() -> Path:
    return Path(os.environ.get("VHD_OUT_DIR", "out"))


def run(config: ScenarioConfig, out_dir=None, simulate: bool = True) -> RunResult:
    """Run a scenario and write ``<name>.csv`` and ``<name>_report.txt`` into ``out_dir``.

    On integration failure the samples produced so far are written to
    ``<name>.csv.partial`` and the :class:`IntegrationError` propagates.
    """
    out_dir = Path(out_dir) if out_dir is not None else default_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = report_path = traj = None
    if simulate and "timeseries" in config.outputs:
        csv_path = out_dir / f"{config.name}.csv"
        try:
            traj = integrate(
                config.initial, config.params, 0.0, config.horizon_days, config.sample_dt, config.tol
            )
        except IntegrationError as exc:
            partial_path = out_dir / f"{config.name}.csv.partial"
            write_csv(partial_path, exc.partial.times, exc.partial.y)
            raise
        write_csv(csv_path, traj.times, traj.y)
    if set(config.outputs) - {"timeseries"}:
        report_path = out_dir / f"{config.name}_report.txt"
        report_path.write_text(analysis_report(config))
    return RunResult(config, csv_path, report_path, traj)
