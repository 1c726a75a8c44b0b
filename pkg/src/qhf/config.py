"""Run configuration with ``QHF_*`` environment overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "QHF_"


@dataclass(frozen=True)
class RunConfig:
    max_free_wires: int = 20
    max_full_qubits: int = 14
    max_clifford_qubits: int = 10
    max_formula_vars: int = 24
    output: str = "text"
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("max_free_wires", "max_full_qubits", "max_clifford_qubits",
                     "max_formula_vars", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.output not in ("text", "json"):
            raise ValueError(f"output must be text or json, got {self.output!r}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> RunConfig:
        """Defaults, then ``QHF_<FIELD>`` variables, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            values[f.name] = raw if f.type == "str" else int(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return replace(cls(), **values)
