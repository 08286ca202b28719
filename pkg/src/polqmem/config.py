"""Experiment configuration: an INI-style key/value file with one section per module.

Grammar (``#`` or ``;`` start a comment line)::

    [arrangement]
    kind = hwp_pair              # rotated_pair | hwp_pair | aligned_pair
    d1_total = 2.70              # pair-total optical depth along D1
    d2_total = 0.99
    alpha1 =                     # 1/m per crystal; overrides d1_total if set
    alpha2 =
    length = 0.01                # m, each crystal
    delta_n = 0.00883
    biref_phase_deg =            # per crystal; overrides delta_n if set
    wavelength = 8.83e-07
    hwp_retardance_error_deg = 0
    hwp_angle_error_deg = 0
    misalignment_deg = 0
    window_phase_deg = 0
    window_angle_deg = 0

    [afc]
    finesse = 3.165
    decoherence_factor = 0.6475
    readout = forward

    [sweep]
    angle_start_deg = 0
    angle_stop_deg = 180         # exclusive
    angle_step_deg = 5

    [profile]
    input_state = D
    n_samples = 2001

    [tomography]
    states = H, V, L, +, alpha
    n_per_setting = 10000
    mc_trials = 100

    [source]
    mean_n = 0.25                # one value, or one per tomography state
    g2_si = 6.0, 9.4             # measured cross-correlations to bound

    [run]
    seed = 20120101

Angles are degrees in the file and radians everywhere else.  Unknown
sections or keys are rejected with the offending line number.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field

from . import jones
from .afc import AfcSpec
from .errors import ConfigError, PolqmemError
from .medium import (DEFAULT_DELTA_N, DEFAULT_LENGTH, DEFAULT_WAVELENGTH, PAIR_KINDS,
                     TYPICAL_IMPERFECTIONS, Arrangement, CrystalSpec)


@dataclass
class ArrangementSection:
    kind: str = "hwp_pair"
    d1_total: float = 2.70
    d2_total: float = 0.99
    alpha1: float | None = None
    alpha2: float | None = None
    length: float = DEFAULT_LENGTH
    delta_n: float = DEFAULT_DELTA_N
    biref_phase_deg: float | None = None
    wavelength: float = DEFAULT_WAVELENGTH
    hwp_retardance_error_deg: float = 0.0
    hwp_angle_error_deg: float = 0.0
    misalignment_deg: float = 0.0
    window_phase_deg: float = 0.0
    window_angle_deg: float = 0.0


@dataclass
class AfcSection:
    finesse: float = 3.165
    decoherence_factor: float = 0.6475
    readout: str = "forward"


@dataclass
class SweepSection:
    angle_start_deg: float = 0.0
    angle_stop_deg: float = 180.0
    angle_step_deg: float = 5.0


@dataclass
class ProfileSection:
    input_state: str = "D"
    n_samples: int = 2001


@dataclass
class TomographySection:
    states: tuple[str, ...] = ("H", "V", "L", "+", "alpha")
    n_per_setting: int = 10_000
    mc_trials: int = 100


@dataclass
class SourceSection:
    mean_n: tuple[float, ...] = (0.25,)
    g2_si: tuple[float, ...] = (6.0, 9.4)


@dataclass
class RunSection:
    seed: int = 20120101


@dataclass
class ExperimentConfig:
    arrangement: ArrangementSection = field(default_factory=ArrangementSection)
    afc: AfcSection = field(default_factory=AfcSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    profile: ProfileSection = field(default_factory=ProfileSection)
    tomography: TomographySection = field(default_factory=TomographySection)
    source: SourceSection = field(default_factory=SourceSection)
    run: RunSection = field(default_factory=RunSection)

    # -- derived model objects ------------------------------------------

    def crystal(self) -> CrystalSpec:
        s = self.arrangement
        if (s.alpha1 is None) != (s.alpha2 is None):
            raise ConfigError("alpha1 and alpha2 must be given together", key="arrangement.alpha1")
        if s.alpha1 is not None:
            alpha1, alpha2 = s.alpha1, s.alpha2
        else:
            alpha1, alpha2 = s.d1_total / 2 / s.length, s.d2_total / 2 / s.length
        delta_n = s.delta_n
        if s.biref_phase_deg is not None:
            delta_n = math.radians(s.biref_phase_deg) * s.wavelength / (2 * math.pi * s.length)
        return CrystalSpec(alpha1, alpha2, s.length, delta_n, s.wavelength)

    def knobs(self) -> dict:
        s = self.arrangement
        return {
            "hwp_retardance_error": math.radians(s.hwp_retardance_error_deg),
            "hwp_angle_error": math.radians(s.hwp_angle_error_deg),
            "misalignment": math.radians(s.misalignment_deg),
            "window_phase": math.radians(s.window_phase_deg),
            "window_angle": math.radians(s.window_angle_deg),
        }

    def arrangement_for(self, kind: str | None = None) -> Arrangement:
        c = self.crystal()
        return Arrangement(kind or self.arrangement.kind, c, c, **self.knobs())

    def afc_spec(self) -> AfcSpec:
        a = self.afc
        return AfcSpec(a.finesse, a.decoherence_factor, a.readout)

    def angles_deg(self) -> list[float]:
        s = self.sweep
        n = math.ceil((s.angle_stop_deg - s.angle_start_deg) / s.angle_step_deg - 1e-9)
        return [s.angle_start_deg + i * s.angle_step_deg for i in range(max(n, 0))]

    def mean_n_for_states(self) -> list[float]:
        m = self.source.mean_n
        states = self.tomography.states
        if len(m) == 1:
            return list(m) * len(states)
        if len(m) != len(states):
            raise ConfigError(f"needs 1 or {len(states)} values, got {len(m)}", key="source.mean_n")
        return list(m)

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for sec in dataclasses.fields(self):
            lines.append(f"[{sec.name}]")
            obj = getattr(self, sec.name)
            for f in dataclasses.fields(obj):
                lines.append(f"{f.name} = {_format_value(getattr(obj, f.name))}")
            lines.append("")
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def validate(self) -> "ExperimentConfig":
        s = self.arrangement
        if s.kind not in PAIR_KINDS:
            raise ConfigError(f"kind must be one of {PAIR_KINDS}", key="arrangement.kind")
        if self.sweep.angle_step_deg <= 0:
            raise ConfigError("must be > 0", key="sweep.angle_step_deg")
        if self.tomography.n_per_setting < 1:
            raise ConfigError("must be >= 1", key="tomography.n_per_setting")
        if self.tomography.mc_trials < 2:
            raise ConfigError("must be >= 2", key="tomography.mc_trials")
        if self.profile.n_samples < 2:
            raise ConfigError("must be >= 2", key="profile.n_samples")
        checks = [
            ("arrangement", self.crystal),
            ("afc", self.afc_spec),
            ("arrangement", self.arrangement_for),
            ("profile.input_state", lambda: jones.standard_state(self.profile.input_state)),
            ("tomography.states",
             lambda: [jones.standard_state(x) for x in self.tomography.states]),
            ("source.mean_n", self.mean_n_for_states),
        ]
        for key, check in checks:
            try:
                check()
            except ConfigError:
                raise
            except PolqmemError as exc:
                raise ConfigError(str(exc), key=key) from None
        if any(m <= 0 for m in self.source.mean_n):
            raise ConfigError("must be > 0", key="source.mean_n")
        return self


def paper_config() -> ExperimentConfig:
    """Default configuration with the typical imperfection knobs switched on.

    Source mean photon numbers are chosen so the per-state cross-correlations
    are 7.6, 6.0, 9.4, 8.0 and 9.2.
    """
    cfg = ExperimentConfig()
    s = cfg.arrangement
    for name, value in TYPICAL_IMPERFECTIONS.items():
        setattr(s, f"{name}_deg", round(math.degrees(value), 9))
    cfg.source.mean_n = tuple(round(1 / (g - 2), 9) for g in (7.6, 6.0, 9.4, 8.0, 9.2))
    return cfg


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return ", ".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _convert(raw: str, ftype, key: str, line: int | None):
    raw = raw.strip()
    optional = "None" in str(ftype)
    if raw == "":
        if optional:
            return None
        raise ConfigError("value is empty", key=key, line=line)
    try:
        if "tuple[str" in str(ftype):
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        if "tuple[float" in str(ftype):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if str(ftype).startswith("int"):
            return int(raw)
        if str(ftype).startswith("float"):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse {raw!r} ({exc})", key=key, line=line) from None


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for i, ln in enumerate(text.splitlines(), start=1):
        stripped = ln.strip()
        m = re.match(r"\[(.+)\]$", stripped)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if key is not None and current == section:
            k = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
            if k == key:
                return i
    return None


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse config text; ``overrides`` maps ``section.key`` to raw string values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       interpolation=None, default_section="__none__")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(exc.message.splitlines()[0] if hasattr(exc, "message") else str(exc),
                          line=line) from None
    cfg = ExperimentConfig()
    sections = {f.name: f for f in dataclasses.fields(cfg)}
    values: dict[tuple[str, str], tuple[str, int | None]] = {}
    for sec in parser.sections():
        if sec not in sections:
            raise ConfigError(f"unknown section [{sec}]", line=_line_of(text, sec))
        for key, raw in parser.items(sec):
            values[(sec, key)] = (raw, _line_of(text, sec, key))
    for dotted, raw in (overrides or {}).items():
        sec, _, key = dotted.partition(".")
        values[(sec, key)] = (raw, None)
    for (sec, key), (raw, line) in values.items():
        if sec not in sections:
            raise ConfigError(f"unknown section [{sec}]", key=f"{sec}.{key}", line=line)
        obj = getattr(cfg, sec)
        ftypes = {f.name: f.type for f in dataclasses.fields(obj)}
        if key not in ftypes:
            raise ConfigError("unknown key", key=f"{sec}.{key}", line=line)
        setattr(obj, key, _convert(raw, ftypes[key], f"{sec}.{key}", line))
    return cfg.validate()


def load_config(path, overrides=None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text, overrides)
