"""JSON run-config documents: schema validation, round-tripping, construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import ic, systems
from .core import make_grid
from .dislocation import DislocationSpec, dislocation_system, periodic_box
from .solver import RunConfig

SYSTEM_KINDS = ("burgers", "transport", "crossing", "linear", "dislocation")
ORACLES = ("burgers_riemann", "characteristics", "self")

_number = {"type": "number"}
_matrix = {"type": "array", "items": {"type": "array", "items": _number, "minItems": 1},
           "minItems": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "profile", "grid", "time"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(SYSTEM_KINDS)},
                "params": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "box": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["lo", "hi"],
                            "properties": {"lo": {"type": "array", "items": _number},
                                           "hi": {"type": "array", "items": _number}},
                        },
                        "A": _matrix,
                        "speed": _number,
                        "a_half": _matrix,
                        "q_half": _matrix,
                        "period": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "profile": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": list(ic.PROFILE_KINDS)}},
                "additionalProperties": {"anyOf": [_number, {"type": "array", "items": _number}]},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x_min", "x_max", "n"],
            "properties": {
                "x_min": _number,
                "x_max": _number,
                "n": {"type": "integer", "minimum": 2},
                "topology": {"enum": ["line", "periodic"]},
            },
        },
        "eps": {"type": "number", "minimum": 0},
        "mollify_eps": {"type": "number", "minimum": 0},
        "time": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t_end"],
            "properties": {
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "cfl": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "monitor_every": {"type": "integer", "minimum": 1},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "fields_csv": {"type": "string"},
                "monitors_csv": {"type": "string"},
                "snapshots": {"type": "integer", "minimum": 1},
            },
        },
        "oracle": {"enum": list(ORACLES)},
        "rescale": {
            "type": "object",
            "additionalProperties": False,
            "required": ["deltas"],
            "properties": {"deltas": {"type": "array", "items": {"type": "number",
                                                                  "exclusiveMinimum": 0},
                                      "minItems": 1}},
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class ConfigFile:
    """The plain-data content of a run-config document."""

    system: dict
    profile: list
    grid: dict
    time: dict
    eps: float = 0.0
    mollify_eps: float = 0.0
    monitor_every: int = 1
    outputs: dict = field(default_factory=dict)
    oracle: str | None = None
    rescale: dict | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ConfigFile":
        validate(doc)
        return cls(
            system=dict(doc["system"]),
            profile=[dict(p) for p in doc["profile"]],
            grid=dict(doc["grid"]),
            time=dict(doc["time"]),
            eps=doc.get("eps", 0.0),
            mollify_eps=doc.get("mollify_eps", 0.0),
            monitor_every=doc.get("monitor_every", 1),
            outputs=dict(doc.get("outputs", {})),
            oracle=doc.get("oracle"),
            rescale=doc.get("rescale"),
        )

    def to_dict(self) -> dict:
        doc = {
            "system": self.system,
            "profile": self.profile,
            "grid": self.grid,
            "eps": self.eps,
            "mollify_eps": self.mollify_eps,
            "time": self.time,
            "monitor_every": self.monitor_every,
            "outputs": self.outputs,
        }
        if self.oracle is not None:
            doc["oracle"] = self.oracle
        if self.rescale is not None:
            doc["rescale"] = self.rescale
        return doc

    @property
    def kind(self) -> str:
        return self.system["kind"]

    @property
    def params(self) -> dict:
        return self.system.get("params", {})

    def profiles(self):
        try:
            return [ic.MonotoneProfile.from_dict(p) for p in self.profile]
        except ValueError as exc:
            raise ConfigError(f"profile: {exc}") from None

    def dislocation_spec(self) -> DislocationSpec:
        p = self.params
        if self.kind != "dislocation" or "a_half" not in p or "q_half" not in p:
            raise ConfigError("system: dislocation configs need params.a_half and params.q_half")
        return DislocationSpec(p["a_half"], p["q_half"], p.get("period", 1.0))

    def build(self, keep_snapshots: bool = False) -> RunConfig:
        """Construct the solver configuration (raises ConfigError on semantic problems)."""
        try:
            grid = make_grid(self.grid["x_min"], self.grid["x_max"], self.grid["n"],
                             self.grid.get("topology", "line"))
            profiles = self.profiles()
            system = self._system(profiles, grid)
            snapshots = self.outputs.get("snapshots", 1)
            return RunConfig(
                system=system,
                profiles=tuple(profiles),
                grid=grid,
                eps=float(self.eps),
                t_end=float(self.time["t_end"]),
                cfl=float(self.time.get("cfl", 0.3)),
                mollify_eps=float(self.mollify_eps),
                monitor_every=int(self.monitor_every),
                keep_snapshots=keep_snapshots or snapshots > 1,
                outputs=dict(self.outputs),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def _system(self, profiles, grid):
        p = self.params
        box = None
        if "box" in p:
            box = systems.BoxU(tuple(p["box"]["lo"]), tuple(p["box"]["hi"]))
        kind = self.kind
        if kind == "burgers":
            return systems.burgers(*(box.lo + box.hi)) if box else systems.burgers()
        if kind == "transport":
            if "speed" not in p:
                raise ConfigError("system: transport needs params.speed")
            if box:
                return systems.transport(p["speed"], box.lo[0], box.hi[0])
            return systems.transport(p["speed"])
        if kind == "crossing":
            return systems.crossing()
        if kind == "linear":
            if "A" not in p:
                raise ConfigError("system: linear needs params.A")
            return systems.linear(p["A"], box)
        spec = self.dislocation_spec()
        if grid.periodic:
            if abs(grid.length - spec.period) > 1e-12 * spec.period:
                raise ConfigError("grid: a periodic dislocation grid must span exactly one period")
            u0 = ic.sample_profile(profiles, grid)
            return dislocation_system(spec, periodic_box(u0))
        lo = [float(np.min(pr(grid.nodes))) for pr in profiles]
        hi = [float(np.max(pr(grid.nodes))) for pr in profiles]
        return dislocation_system(spec, box or systems.BoxU(tuple(lo), tuple(hi)))


def validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{where}: {err.message}")
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines))


def parse(text: str) -> ConfigFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return ConfigFile.from_dict(doc)


def serialize(cfg: ConfigFile) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def load(path) -> ConfigFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return parse(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def demo_dir() -> Path:
    return Path(__file__).parent / "demos"


def demo_names():
    return sorted(p.stem for p in demo_dir().glob("*.json"))


def load_demo(name: str) -> ConfigFile:
    return load(demo_dir() / f"{name}.json")
