"""Registry of native (built-in) functions.

A native is "modeled" when the static analysis knows a function value of
that name exists (it gets a function node in the flow graph, so direct
calls to it resolve statically).  The behavioral spec describes what the
native does at runtime; unmodeled natives, and the callback behavior of
invokes-argument natives, are exactly the gaps the root-cause labels
measure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

BEHAVIORS = {
    "pure",
    "invokes-argument",
    "returns-function",
    "evaluates-code",
    "creates-function",
    "binds",
    "reflective-call",
    "reflective-apply",
}

# Names of the function-method reflectives, looked up as properties of
# function values rather than as globals.
REFLECTIVE_METHODS = ("call", "apply", "bind")


@dataclass
class NativeSpec:
    name: str
    modeled: bool
    behavior: str
    global_binding: bool = True  # False for call/apply/bind method natives

    def __post_init__(self):
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"unknown native behavior {self.behavior!r}")


@dataclass
class NativeConfig:
    specs: dict[str, NativeSpec] = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.specs

    def get(self, name) -> NativeSpec | None:
        return self.specs.get(name)

    def is_modeled(self, name) -> bool:
        spec = self.specs.get(name)
        return bool(spec and spec.modeled)

    def global_names(self):
        return [s.name for s in self.specs.values() if s.global_binding]

    def add(self, spec: NativeSpec):
        if spec.name in self.specs:
            raise ValueError(f"duplicate native {spec.name!r}")
        self.specs[spec.name] = spec
        return self

    @classmethod
    def default(cls) -> "NativeConfig":
        cfg = cls()
        cfg.add(NativeSpec("evalCode", modeled=True, behavior="evaluates-code"))
        cfg.add(NativeSpec("makeFunction", modeled=True, behavior="creates-function"))
        cfg.add(NativeSpec("call", modeled=True, behavior="reflective-call",
                           global_binding=False))
        cfg.add(NativeSpec("apply", modeled=True, behavior="reflective-apply",
                           global_binding=False))
        cfg.add(NativeSpec("bind", modeled=True, behavior="binds",
                           global_binding=False))
        # A library-style iterator whose creation is modeled statically but
        # whose callback into user code is not.
        cfg.add(NativeSpec("each", modeled=True, behavior="invokes-argument"))
        # Identity combinator with a static summary (arg flows to result).
        cfg.add(NativeSpec("identity", modeled=True, behavior="returns-function"))
        # A standard-library function the static analysis has no model for.
        cfg.add(NativeSpec("mysteryFn", modeled=False, behavior="pure"))
        # Seeded PRNG helper; see --seed.
        cfg.add(NativeSpec("rand", modeled=True, behavior="pure"))
        return cfg

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "kind": "native-config",
            "natives": [
                {"name": s.name, "modeled": s.modeled, "behavior": s.behavior,
                 "globalBinding": s.global_binding}
                for s in self.specs.values()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NativeConfig":
        cfg = cls()
        for item in data["natives"]:
            cfg.add(NativeSpec(item["name"], item["modeled"], item["behavior"],
                               item.get("globalBinding", True)))
        return cfg

    @classmethod
    def load(cls, path) -> "NativeConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))
