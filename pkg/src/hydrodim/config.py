"""Experiment configuration: INI-style ``key = value`` files with sections."""
from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_n_list(text: str) -> list[int]:
    """``"1024, 2048"`` or ``"2^10..2^18"`` (powers of two, inclusive)."""
    text = text.strip()
    m = re.fullmatch(r"2\^(\d+)\s*\.\.\s*2\^(\d+)", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        return [2**k for k in range(a, b + 1)]
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse level list {text!r}") from exc


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def _key(f) -> str:
    return f.metadata.get("key", f.name)


@dataclass
class FamilyConfig:
    family: str = "hydrogen"
    lam: float = field(default=0.25, metadata={"key": "lambda"})
    kappa: float | None = None
    alpha: float = 1.0
    L: float = 1.0
    sigma0: float = 0.0
    custom_path: str | None = None

    def as_spec(self) -> dict:
        spec = {"family": self.family, "lambda": self.lam, "alpha": self.alpha,
                "L": self.L, "sigma0": self.sigma0}
        if self.kappa is not None:
            spec["kappa"] = self.kappa
        if self.custom_path is not None:
            spec["custom_path"] = self.custom_path
        return spec


@dataclass
class StateConfig:
    recipe: str = "power"
    j: int = 10
    n_max: int = 2**19
    normalized: bool = False
    k: int = 1
    s: float = 2.0
    q_check: float = 0.5
    sigma: float = 0.3
    level: int = 1
    base_n_max: int = 100
    path: str | None = None
    decay_min: float = 1.05
    decay_max: float = 3.0


@dataclass
class GapsConfig:
    n_max: int = 1000


@dataclass
class ScanConfig:
    q: str = "0.5"
    n_list: str = "2^10..2^18"
    eps_max: float | None = None
    eps_min: float | None = None
    ratio: float = 2 ** -0.5
    window_lo: float | None = None
    window_hi: float | None = None
    ceiling_slack: float = 0.05

    @property
    def q_values(self) -> list[float]:
        return parse_floats(self.q)

    @property
    def levels(self) -> list[int]:
        return parse_n_list(self.n_list)


@dataclass
class DynamicsConfig:
    basis: str = "scrambled"
    k: int | None = None
    p: float = 1.0
    initial: str = "state"
    level: int = 7
    t_end: float | None = None
    decades: float = 4.0
    points_per_decade: int = 32
    window_lo: float | None = None
    window_hi: float | None = None
    dimension_n_max: int = 2**19
    dimension_n_list: str = "2^10..2^18"
    gsb_slack: float = 0.1
    gsb_gate: bool = False
    write_w: bool = False


@dataclass
class VerifyConfig:
    trials: int = 200
    n_atoms: int = 100
    naive_trials: int = 50
    inject_failure: bool = False


@dataclass
class RunConfig:
    out: str = "out"
    seed: int | None = None
    threads: int = 1


@dataclass
class ExperimentConfig:
    family: FamilyConfig = field(default_factory=FamilyConfig)
    state: StateConfig = field(default_factory=StateConfig)
    gaps: GapsConfig = field(default_factory=GapsConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @property
    def randomized(self) -> bool:
        return (self.state.recipe == "random" or self.dynamics.basis == "random_orthogonal")


def _convert(raw: str, typ: str, where: str):
    raw = raw.strip()
    base = typ.replace(" | None", "")
    if "None" in typ and raw.lower() in ("", "none"):
        return None
    try:
        if base == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if base == "int":
            return int(raw)
        if base == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot read {raw!r} as {base}") from exc


def load_config(path=None, text: str | None = None) -> ExperimentConfig:
    """Parse a config file; unknown sections or keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        if text is not None:
            parser.read_string(text)
        elif path is not None:
            with open(Path(path)) as fh:
                parser.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(str(exc)) from exc

    cfg = ExperimentConfig()
    sections = {f.name: f for f in dataclasses.fields(cfg)}
    for name in parser.sections():
        if name not in sections:
            raise ConfigError(f"unknown section [{name}]")
        target = getattr(cfg, name)
        known = {_key(f): f for f in dataclasses.fields(target)}
        for key, raw in parser.items(name):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            f = known[key]
            setattr(target, f.name, _convert(raw, str(f.type), f"[{name}] {key}"))
    return cfg


def defaults_text() -> str:
    """The default configuration, in loadable form."""
    cfg = ExperimentConfig()
    lines = []
    for sec in dataclasses.fields(cfg):
        lines.append(f"[{sec.name}]")
        for f in dataclasses.fields(getattr(cfg, sec.name)):
            val = getattr(getattr(cfg, sec.name), f.name)
            lines.append(f"{_key(f)} = {'none' if val is None else str(val).lower() if isinstance(val, bool) else val}")
        lines.append("")
    return "\n".join(lines)
