"""INI-style run configuration.

Sections and keys (all optional; case matters in key names)::

    [run]       experiment, scheme, s, seed, out, initial, study, dims, delta, width_cells,
                binary, snapshots
    [material]  alpha, a, Ms, Ku, A, A_afm, gamma      (SI; omitted keys take the thin-film values)
    [grid]      cells = "50 50 5", cell_size = "2 nm" or "2 2 2 nm"
    [time]      dt, T, cadence, units
    [field]     direction, magnitude, B_max, dB, threshold, max_steps, tilt, check_every

Times accept fs/ps/ns/s suffixes (``dt = 1 fs``); bare numbers use ``units``
(default fs).  ``converge`` and ``exchange-limit`` runs are dimensionless, so
their times take no suffix.  Lengths accept nm/m suffixes, default nm.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

from afmllg.core import TABLE6, InvalidParameterError, MaterialParams
from afmllg.schemes import SCHEMES

EXPERIMENTS = ("converge", "relax", "wall", "phase-diagram", "exchange-limit")
TIME_UNITS = {"fs": 1e-15, "ps": 1e-12, "ns": 1e-9, "s": 1.0}
LENGTH_UNITS = {"nm": 1e-9, "m": 1.0}
MATERIAL_KEYS = {"alpha": "alpha", "a": "a_lattice", "Ms": "Ms", "Ku": "Ku", "A": "A_ex",
                 "A_afm": "A_afm", "gamma": "gamma"}

KEYS = {
    "run": {"experiment", "scheme", "s", "seed", "out", "initial", "study", "dims", "delta",
            "width_cells", "binary", "snapshots"},
    "material": set(MATERIAL_KEYS),
    "grid": {"cells", "cell_size"},
    "time": {"dt", "T", "cadence", "units"},
    "field": {"direction", "magnitude", "B_max", "dB", "threshold", "max_steps", "tilt", "check_every"},
}


class ConfigError(ValueError):
    """Malformed or invalid configuration; carries the offending line and key when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class RunConfig:
    experiment: str = "relax"
    scheme: str = "scheme-a"
    material: MaterialParams = TABLE6
    cells: tuple = (50, 50, 5)
    cell_size: tuple = (2e-9, 2e-9, 2e-9)     # metres
    dt: float | None = None                   # seconds, or dimensionless for converge/exchange-limit
    T: float | None = None
    cadence: int = 100
    direction: tuple = (1.0, 0.0, 0.0)        # or the sweep axis name for phase-diagram
    magnitude: float = 0.0                    # Tesla
    sweep: dict = field(default_factory=dict)
    s: float = 1.0
    seed: int = 42
    out: str = "out"
    initial: str = "paper"
    study: str = "all"
    dims: int = 1
    delta: tuple = (2.0,)
    width_cells: float = 4.0
    binary: bool = False
    snapshots: bool = False
    given: frozenset = frozenset()            # "section.key" entries present in the document

    @property
    def dimensionless_time(self) -> bool:
        return self.experiment in ("converge", "exchange-limit")


def _float(text: str, key: str, line) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line, key) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {text!r}", line, key)
    return v


def _int(text: str, key: str, line) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line, key) from None


def _with_unit(text: str, units: dict, default: str, key: str, line) -> list:
    parts = text.replace(",", " ").split()
    if parts and parts[-1] in units:
        scale = units[parts.pop()]
    else:
        scale = units[default]
    if not parts:
        raise ConfigError(f"{key}: missing value", line, key)
    return [_float(p, key, line) * scale for p in parts]


def parse_time(text: str, dimensionless: bool = False, units: str = "fs") -> float:
    """A single time value; ``1 fs``, ``1fs`` or a bare number in ``units``."""
    t = str(text).strip()
    m = re.fullmatch(r"(.*?)\s*(fs|ps|ns|s)", t)
    if dimensionless:
        if m:
            raise ConfigError(f"time {t!r}: this experiment is dimensionless, drop the unit", key="dt")
        return _float(t, "dt", None)
    if m:
        return _float(m.group(1), "dt", None) * TIME_UNITS[m.group(2)]
    return _float(t, "dt", None) * TIME_UNITS[units]


def _bool(text: str, key: str, line) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}", line, key)


def _locate(text: str) -> dict:
    """Map (section, key) to its 1-based line number."""
    where, section = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[([^\]]*)\]", s)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"([^=:\s]+)\s*[=:]", s)
        if m and section is not None and not raw[:1].isspace():
            where.setdefault((section, m.group(1)), n)
    return where


def parse_config(text: str, experiment: str = "relax") -> RunConfig:
    """Parse and validate a configuration document; raises ConfigError.

    ``experiment`` applies when the document has no ``[run] experiment`` key.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__defaults__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno, exc.option) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0]) from None

    where = _locate(text)
    for sec in cp.sections():
        if sec not in KEYS:
            raise ConfigError(f"unknown section [{sec}]", _section_line(text, sec))
        for key in cp[sec]:
            if key not in KEYS[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]", where.get((sec, key)), key)

    def get(sec, key):
        if cp.has_section(sec) and key in cp[sec]:
            return cp[sec][key].strip(), where.get((sec, key))
        return None, None

    cfg = RunConfig(experiment=experiment,
                    given=frozenset(f"{sec}.{key}" for sec in cp.sections() for key in cp[sec]))
    v, ln = get("run", "experiment")
    if v is not None:
        if v not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {v!r}", ln, "experiment")
        cfg.experiment = v
    v, ln = get("run", "scheme")
    if v is not None:
        if v not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {v!r}", ln, "scheme")
        cfg.scheme = v
    v, ln = get("run", "s")
    if v is not None:
        cfg.s = _float(v, "s", ln)
        if not 0 < cfg.s <= 1:
            raise ConfigError(f"s must lie in (0, 1], got {cfg.s!r}", ln, "s")
    v, ln = get("run", "seed")
    if v is not None:
        cfg.seed = _int(v, "seed", ln)
    for key in ("out", "initial", "study"):
        v, ln = get("run", key)
        if v is not None:
            setattr(cfg, key, v)
    if cfg.study not in ("all", "time", "space"):
        raise ConfigError(f"study must be all, time or space, got {cfg.study!r}", where.get(("run", "study")), "study")
    v, ln = get("run", "dims")
    if v is not None:
        cfg.dims = _int(v, "dims", ln)
        if cfg.dims not in (1, 3):
            raise ConfigError("dims must be 1 or 3", ln, "dims")
    v, ln = get("run", "delta")
    if v is not None:
        cfg.delta = tuple(_float(p, "delta", ln) for p in v.replace(",", " ").split())
        if not cfg.delta:
            raise ConfigError("delta: missing value", ln, "delta")
    v, ln = get("run", "width_cells")
    if v is not None:
        cfg.width_cells = _float(v, "width_cells", ln)
        if not cfg.width_cells > 0:
            raise ConfigError("width_cells must be > 0", ln, "width_cells")
    for key in ("binary", "snapshots"):
        v, ln = get("run", key)
        if v is not None:
            setattr(cfg, key, _bool(v, key, ln))

    values = {}
    for key, attr in MATERIAL_KEYS.items():
        v, ln = get("material", key)
        if v is None:
            continue
        x = _float(v, key, ln)
        try:
            # validate one key at a time so the error names the config key
            TABLE6.with_(**{attr: x})
        except InvalidParameterError as exc:
            raise ConfigError(f"{key} {_constraint(attr)}, got {x!r}", ln, key) from None
        values[attr] = x
    cfg.material = TABLE6.with_(**values)

    v, ln = get("grid", "cells")
    if v is not None:
        cells = tuple(_int(p, "cells", ln) for p in v.replace(",", " ").split())
        if len(cells) not in (1, 3) or any(c < 1 for c in cells):
            raise ConfigError("cells must be 1 or 3 positive integers", ln, "cells")
        cfg.cells = cells
    v, ln = get("grid", "cell_size")
    if v is not None:
        size = _with_unit(v, LENGTH_UNITS, "nm", "cell_size", ln)
        if any(not h > 0 for h in size) or len(size) not in (1, 3):
            raise ConfigError("cell_size must be one or three positive lengths", ln, "cell_size")
        cfg.cell_size = tuple(size * 3) if len(size) == 1 else tuple(size)

    v, ln = get("time", "units")
    units = "fs"
    if v is not None:
        if v not in TIME_UNITS:
            raise ConfigError(f"units must be one of {tuple(TIME_UNITS)}", ln, "units")
        units = v
    for key in ("dt", "T"):
        v, ln = get("time", key)
        if v is None:
            continue
        if cfg.dimensionless_time:
            x = _float(v, key, ln)
        else:
            vals = _with_unit(v, TIME_UNITS, units, key, ln)
            if len(vals) != 1:
                raise ConfigError(f"{key}: expected one value", ln, key)
            x = vals[0]
        if key == "dt" and not x > 0 or key == "T" and not x >= 0:
            raise ConfigError(f"{key} must be {'> 0' if key == 'dt' else '>= 0'}", ln, key)
        setattr(cfg, key, x)
    v, ln = get("time", "cadence")
    if v is not None:
        cfg.cadence = _int(v, "cadence", ln)
        if cfg.cadence < 1:
            raise ConfigError("cadence must be >= 1", ln, "cadence")

    v, ln = get("field", "direction")
    if v is not None:
        if v in ("parallel", "perpendicular"):
            cfg.direction = v
        else:
            d = tuple(_float(p, "direction", ln) for p in v.replace(",", " ").split())
            if len(d) != 3 or not any(d):
                raise ConfigError("direction must be parallel, perpendicular or a nonzero 3-vector", ln, "direction")
            cfg.direction = d
    v, ln = get("field", "magnitude")
    if v is not None:
        cfg.magnitude = _float(v, "magnitude", ln)
    for key, conv, ok, rule in (("B_max", _float, lambda x: x >= 0, ">= 0"),
                                ("dB", _float, lambda x: x > 0, "> 0"),
                                ("threshold", _float, lambda x: x > 0, "> 0"),
                                ("max_steps", _int, lambda x: x >= 1, ">= 1"),
                                ("check_every", _int, lambda x: x >= 1, ">= 1"),
                                ("tilt", _float, lambda x: True, "")):
        v, ln = get("field", key)
        if v is None:
            continue
        x = conv(v, key, ln)
        if not ok(x):
            raise ConfigError(f"{key} must be {rule}", ln, key)
        cfg.sweep[key] = x
    return cfg


def _constraint(attr: str) -> str:
    return {"Ku": "must be >= 0", "A_ex": "must be >= 0", "A_afm": "must be finite"}.get(attr, "must be > 0")


def _section_line(text: str, section: str):
    for n, raw in enumerate(text.splitlines(), 1):
        if raw.strip().startswith("[") and raw.strip()[1:].split("]")[0].strip() == section:
            return n
    return None
