"""JSON configuration documents.

Layout::

    {
      "ensembles": [{"id": "E1", "g": 1.0, "N": 1.0}, ...],
      "photons": [{"id": "a", "couplings": [{"ensemble": "E1", "g": 1.0}, ...]}],
      "controls": {"E1": {"kind": "storage_ramp", "omega_max": 2000.0, "T": 1600.0,
                          "ratio_group": "storage"}, ...},
      "input_state": {"kind": "cat2", "alpha0": 1.0, "beta0": -1.0, "sign": -1},
      "run": {"T": 1600.0, "steps": 32000}
    }

``controls`` is optional for scenarios that derive their own schedules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from corrmem.schedule import ControlSchedule
from corrmem.system import ConfigError, CouplingEdge, EnsembleSpec, SystemConfig


@dataclass(frozen=True)
class InputState:
    kind: str = "coherent"
    alpha0: Any = 1.0  # scalar (every photon) or one value per photon
    beta0: Any = None
    sign: int = 1

    def __post_init__(self):
        if self.kind not in ("coherent", "cat2"):
            raise ConfigError(f"unknown input_state kind {self.kind!r}")
        if self.kind == "cat2" and self.sign not in (1, -1):
            raise ConfigError("cat2 sign must be +1 or -1")


@dataclass(frozen=True)
class ConfigDocument:
    system: SystemConfig
    input_state: InputState = InputState()
    run: dict = field(default_factory=dict)
    has_controls: bool = True


def _schedule(d: dict) -> ControlSchedule:
    return ControlSchedule(
        kind=d["kind"],
        omega_max=float(d.get("omega_max", 0.0)),
        T=float(d["T"]),
        ratio_group=d.get("ratio_group"),
        samples=tuple(tuple(p) for p in d.get("samples", ())),
    )


def parse_config(doc: dict) -> ConfigDocument:
    try:
        ensembles = [EnsembleSpec(str(e["id"]), N=float(e.get("N", 1.0)), g=float(e.get("g", 1.0))) for e in doc["ensembles"]]
        photons, edges = [], []
        for p in doc["photons"]:
            photons.append(str(p["id"]))
            for c in p.get("couplings", []):
                edges.append(CouplingEdge(str(p["id"]), str(c["ensemble"]), float(c["g"])))
        controls = {str(k): _schedule(v) for k, v in doc.get("controls", {}).items()}
        inp = doc.get("input_state", {})
        input_state = InputState(
            kind=inp.get("kind", "coherent"),
            alpha0=inp.get("alpha0", 1.0),
            beta0=inp.get("beta0"),
            sign=int(inp.get("sign", 1)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    system = SystemConfig(tuple(ensembles), tuple(photons), tuple(edges), controls)
    return ConfigDocument(system, input_state, dict(doc.get("run", {})), bool(controls))


def load_config(path: str | Path) -> ConfigDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_config(json.load(fh))


def config_to_dict(config: SystemConfig, input_state: InputState | None = None, run: dict | None = None) -> dict:
    doc: dict = {
        "ensembles": [{"id": e.id, "g": e.g, "N": e.N} for e in config.ensembles],
        "photons": [
            {"id": p, "couplings": [{"ensemble": c.ensemble, "g": c.g} for c in config.edges if c.photon == p]}
            for p in config.photons
        ],
        "controls": {},
    }
    for key, s in config.controls.items():
        entry = {"kind": s.kind, "omega_max": s.omega_max, "T": s.T}
        if s.ratio_group is not None:
            entry["ratio_group"] = s.ratio_group
        if s.samples:
            entry["samples"] = [list(p) for p in s.samples]
        doc["controls"][key] = entry
    if input_state is not None:
        doc["input_state"] = {"kind": input_state.kind, "alpha0": input_state.alpha0, "sign": input_state.sign}
        if input_state.beta0 is not None:
            doc["input_state"]["beta0"] = input_state.beta0
    if run:
        doc["run"] = dict(run)
    return doc
