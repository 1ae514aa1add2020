"""Run configuration files.

INI syntax (``[section]`` headers, ``key = value`` lines, ``#`` comments). Values
are SI unless they carry a unit suffix such as ``14 mm``, ``15 deg`` or
``1e-3 Pa*s``. Every key has a default except ``run.mode``; unknown sections
and keys are errors. :func:`render_config` writes a file that parses back to
an equal :class:`RunConfig`.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

from .errors import ConfigurationError

MODES = ("validate-stokes", "validate-rigidbody", "forces-bench", "simulate-scallop")

UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "time": {"s": 1.0, "ms": 1e-3},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "viscosity": {"Pa*s": 1.0, "Pa.s": 1.0, "mPa*s": 1e-3},
}


class ConfigError(ConfigurationError):
    """Parse or validation failure; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Key:
    kind: str  # length, time, angle, viscosity, float, int, bool, choice, str, ints, lengths
    default: object
    choices: tuple = ()
    positive: bool = True


SCHEMA = {
    "run": {
        "mode": Key("choice", None, MODES),
        "out": Key("str", "out"),
        "seed": Key("int", 0, positive=False),
    },
    "stokes": {
        "mu": Key("viscosity", 1.0),
        "order": Key("choice", 2, (2, 3)),
        "levels": Key("ints", (8, 16, 32, 64)),
        "pattern": Key("choice", "crisscross", ("crisscross", "right")),
    },
    "forces": {
        "levels": Key("ints", (8, 16, 32)),
        "disc_radius": Key("length", 0.15),
        "disc_h": Key("lengths", (0.04, 0.02, 0.01)),
    },
    "rigidbody": {
        "t_final": Key("time", 60.0),
        "dt": Key("time", 0.2),
        "norm_steps": Key("int", 100_000),
        "norm_dt": Key("time", 0.01),
        "energy_dt": Key("time", 1e-3),
    },
    "scallop": {
        "valve_length": Key("length", 0.010),
        "valve_thickness": Key("length", 0.001),
        "hinge_gap": Key("length", 0.001),
        "tip_opening": Key("length", 0.014),
        "amplitude": Key("angle", math.radians(15.0)),
        "period": Key("time", 2.0),
        "centroid": Key("lengths", (0.05, 0.05)),
        "orientation": Key("angle", math.pi / 2, positive=False),
        "min_gap": Key("length", 5e-4),
        "arc_step": Key("angle", math.radians(6.0)),
    },
    "simulation": {
        "box": Key("lengths", (0.0, 0.0, 0.1, 0.1), positive=False),
        "target_h": Key("length", 5e-4),
        "wall_ratio": Key("float", 8.0),
        "dt": Key("time", None),  # period / 100 when omitted
        "periods": Key("int", 2),
        "method": Key("choice", "volume", ("volume", "surface")),
        "mu": Key("viscosity", 1.0),
        "deform": Key("bool", True),
        "mirror_mesh": Key("bool", True),
        "mesh_motion": Key("choice", "morph", ("morph", "remesh")),
        "snapshots": Key("bool", False),
    },
}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    out: str = "out"
    seed: int = 0
    sections: dict = field(default_factory=dict)

    def __getitem__(self, section):
        return self.sections[section]

    def scallop_params(self):
        from .swimmer import ScallopParams

        s = self.sections["scallop"]
        return ScallopParams.from_tip_opening(
            s["tip_opening"],
            valve_length=s["valve_length"],
            valve_thickness=s["valve_thickness"],
            hinge_gap=s["hinge_gap"],
            stroke_amplitude=s["amplitude"],
            period=s["period"],
            initial_centroid=tuple(s["centroid"]),
            initial_orientation=s["orientation"],
            min_gap=s["min_gap"],
            arc_step=s["arc_step"],
        )

    def simulation_config(self, snapshot_dir=None):
        from .swimmer import SimulationConfig

        s = self.sections["simulation"]
        p = self.scallop_params()
        return SimulationConfig(
            params=p,
            mu=s["mu"],
            box=tuple(s["box"]),
            target_h=s["target_h"],
            wall_ratio=s["wall_ratio"],
            dt=s["dt"],
            t_final=s["periods"] * p.period,
            method=s["method"],
            deform=s["deform"],
            snapshot_dir=snapshot_dir if s["snapshots"] else None,
            symmetric_mesh=s["mirror_mesh"],
            mesh_motion=s["mesh_motion"],
        )


_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def _quantity(text, kind, line):
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"expected a number, got {text!r}", line)
    value, unit = float(m.group(1)), m.group(2)
    if kind not in UNITS:
        if unit:
            raise ConfigError(f"unexpected unit {unit!r}", line)
        return value
    if not unit:
        return value
    scale = UNITS[kind].get(unit)
    if scale is None:
        raise ConfigError(f"unit {unit!r} is not a {kind} unit (use one of {', '.join(UNITS[kind])})", line)
    return value * scale


def _convert(raw, key: Key, name, line):
    raw = raw.strip()
    k = key.kind
    if k == "str":
        if not raw:
            raise ConfigError(f"{name} must not be empty", line)
        return raw
    if k == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{name} must be true or false, got {raw!r}", line)
    if k == "choice":
        for c in key.choices:
            if raw == str(c):
                return c
        raise ConfigError(f"{name} must be one of {', '.join(map(str, key.choices))}, got {raw!r}", line)
    if k in ("int", "ints"):
        parts = [p.strip() for p in raw.split(",")] if k == "ints" else [raw]
        try:
            vals = tuple(int(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{name} must be integer, got {raw!r}", line) from None
        if key.positive and any(v <= 0 for v in vals):
            raise ConfigError(f"{name} must be positive", line)
        return vals if k == "ints" else vals[0]
    if k == "lengths":
        vals = tuple(_quantity(p, "length", line) for p in raw.split(","))
        if key.positive and any(not v > 0 for v in vals):
            raise ConfigError(f"{name} must be positive", line)
        return vals
    v = _quantity(raw, k, line)
    if not math.isfinite(v):
        raise ConfigError(f"{name} must be finite", line)
    if key.positive and not v > 0:
        raise ConfigError(f"{name} must be positive", line)
    return v


def _key_lines(text):
    """1-based line of each ``(section, key)`` and section header."""
    lines, section = {}, None
    for i, ln in enumerate(text.splitlines(), 1):
        s = ln.strip()
        if s.startswith("[") and "]" in s:
            section = s[1 : s.index("]")].strip()
            lines.setdefault((section, None), i)
        elif section is not None and "=" in s and not s.startswith(("#", ";")):
            lines.setdefault((section, s.split("=", 1)[0].strip().lower()), i)
    return lines


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#", ";"), delimiters=("=",)
    )
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        line, bad = exc.errors[0]
        raise ConfigError(f"cannot parse {bad.strip()!r}", line) from None
    where = _key_lines(text)

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", where.get((section, None)))
        for name in parser[section]:
            if name not in SCHEMA[section]:
                raise ConfigError(f"unknown key {name!r} in [{section}]", where.get((section, name)))

    values = {}
    for section, keys in SCHEMA.items():
        got = parser[section] if parser.has_section(section) else {}
        vals = {}
        for name, key in keys.items():
            if name in got:
                vals[name] = _convert(got[name], key, f"{section}.{name}", where.get((section, name)))
            else:
                vals[name] = key.default
        values[section] = vals

    run = values.pop("run")
    if run["mode"] is None:
        raise ConfigError("missing mandatory key 'mode' in [run]")
    _validate(values, where)
    return RunConfig(mode=run["mode"], out=run["out"], seed=run["seed"], sections=values)


def _validate(v, where):
    sim, sc, rb = v["simulation"], v["scallop"], v["rigidbody"]
    period = sc["period"]
    if sim["dt"] is None:
        sim["dt"] = period / 100.0
    if not sim["dt"] < period / 10.0:
        raise ConfigError(
            f"simulation.dt = {sim['dt']:g} s must be below period/10 = {period / 10:g} s",
            where.get(("simulation", "dt")),
        )
    n = period / sim["dt"]
    if abs(n - round(n)) > 1e-9 * n:
        raise ConfigError("the period must be a whole number of time steps", where.get(("simulation", "dt")))
    if len(sc["centroid"]) != 2:
        raise ConfigError("scallop.centroid needs two coordinates", where.get(("scallop", "centroid")))
    box = sim["box"]
    if len(box) != 4 or not (box[2] > box[0] and box[3] > box[1]):
        raise ConfigError("simulation.box must be xmin, ymin, xmax, ymax with positive extent",
                          where.get(("simulation", "box")))
    if not sim["wall_ratio"] >= 1.0:
        raise ConfigError("simulation.wall_ratio must be at least 1", where.get(("simulation", "wall_ratio")))
    if not sc["tip_opening"] < 2 * sc["valve_length"]:
        raise ConfigError("scallop.tip_opening must be below twice the valve length",
                          where.get(("scallop", "tip_opening")))
    for name in ("dt", "norm_dt", "energy_dt"):
        if not rb[name] < rb["t_final"]:
            raise ConfigError(f"rigidbody.{name} must be below t_final", where.get(("rigidbody", name)))
    for name in ("levels",):
        for sec in ("stokes", "forces"):
            lv = v[sec][name]
            if len(lv) < 3 or any(b <= a for a, b in zip(lv, lv[1:])):
                raise ConfigError(f"{sec}.{name} needs at least three increasing entries", where.get((sec, name)))
    dh = v["forces"]["disc_h"]
    if len(dh) < 3 or any(b >= a for a, b in zip(dh, dh[1:])):
        raise ConfigError("forces.disc_h needs at least three decreasing entries", where.get(("forces", "disc_h")))


def _render_value(value, key: Key):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) if key.kind == "lengths" else str(x) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(cfg: RunConfig) -> str:
    """Canonical text for ``cfg``: every key present, SI values without units."""
    out = ["[run]", f"mode = {cfg.mode}", f"out = {cfg.out}", f"seed = {cfg.seed}"]
    for section, keys in SCHEMA.items():
        if section == "run":
            continue
        out += ["", f"[{section}]"]
        for name, key in keys.items():
            out.append(f"{name} = {_render_value(cfg.sections[section][name], key)}")
    return "\n".join(out) + "\n"


def default_config(mode: str) -> RunConfig:
    return parse_config(f"[run]\nmode = {mode}\n")


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
