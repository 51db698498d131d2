"""Run configuration documents (JSON).

A minimal spectrum config::

    {
      "hamiltonian": {"eps": ["1"], "q": 2,
                      "A": [{"s": 0, "k": 1, "value": "6"},
                            {"s": 1, "k": 1, "value": "-5"},
                            {"s": 2, "k": 1, "value": "1"}]},
      "L": 1, "M": 1
    }

``L``/``M`` are shorthands for the even/odd sectors of a stride-2 model;
general sectors go in ``"sectors": [{"r": 0, "N": 3}, ...]``.  Coefficients
may be integers, decimal strings or ``"p/q"`` strings and stay exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .errors import QESError
from .model import HamiltonianSpec, SectorBasis, to_fraction


class ConfigError(QESError):
    """The configuration document is malformed."""


@dataclass(frozen=True)
class ScanSettings:
    variable: tuple[str, int, int]  # ("A", s, k) or ("eps", p, 0)
    start: Fraction
    stop: Fraction
    steps: int
    mode: str = "free"

    def values(self) -> list[Fraction]:
        span = self.stop - self.start
        return [self.start + span * i / (self.steps - 1) for i in range(self.steps)]

    @property
    def label(self) -> str:
        kind, a, b = self.variable
        return f"A_{a},{b}" if kind == "A" else f"eps_{a}"


@dataclass(frozen=True)
class RunConfig:
    spec: Optional[HamiltonianSpec]
    sectors: tuple[SectorBasis, ...]
    shape: Optional[tuple[int, int]] = None
    n_max: Optional[int] = None
    tol: float = 1e-12
    oracle_tol: float = 1e-10
    scan: Optional[ScanSettings] = None
    modes: Optional[list] = None
    terms: Optional[list] = None
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def q(self) -> int:
        if self.spec is not None:
            return self.spec.q
        return self.sectors[0].q if self.sectors else 2

    def effective_shape(self) -> tuple[int, int]:
        if self.shape is not None:
            return self.shape
        if self.spec is None:
            raise ConfigError("a 'shape' [s0, k0] or a 'hamiltonian' is required")
        return (self.spec.s0, self.spec.k0)

    def select(self, which: str) -> tuple[SectorBasis, ...]:
        """Filter sectors by ``even``/``odd``/``both`` (parity of the offset)."""
        if which == "both":
            return self.sectors
        parity = 0 if which == "even" else 1
        return tuple(s for s in self.sectors if s.r % 2 == parity)


def parse_variable(text: str) -> tuple[str, int, int]:
    """``"A_2_1"``/``"A_2"`` -> ``("A", 2, 1)``; ``"eps_3"`` -> ``("eps", 3, 0)``."""
    parts = text.replace(",", "_").split("_")
    try:
        if parts[0] == "A" and len(parts) in (2, 3):
            return ("A", int(parts[1]), int(parts[2]) if len(parts) == 3 else 1)
        if parts[0] == "eps" and len(parts) == 2 and int(parts[1]) >= 1:
            return ("eps", int(parts[1]), 0)
    except ValueError:
        pass
    raise ConfigError(f"scan variable {text!r} must look like 'A_s_k' or 'eps_p'")


def _sectors(doc: dict, q: int) -> tuple[SectorBasis, ...]:
    out = []
    for entry in doc.get("sectors", []):
        out.append(SectorBasis(int(entry.get("q", q)), int(entry.get("r", 0)), int(entry["N"])))
    if "L" in doc:
        out.append(SectorBasis(q, 0, int(doc["L"])))
    if "M" in doc:
        out.append(SectorBasis(q, 1, int(doc["M"])))
    return tuple(out)


def parse_config(doc: Any) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    try:
        spec = HamiltonianSpec.from_dict(doc["hamiltonian"]) if "hamiltonian" in doc else None
        q = spec.q if spec is not None else int(doc.get("q", 2))
        sectors = _sectors(doc, q)
        shape = tuple(int(x) for x in doc["shape"]) if "shape" in doc else None
        if shape is not None and len(shape) != 2:
            raise ConfigError("'shape' must be [s0, k0]")
        tol = float(doc.get("tol", 1e-12))
        oracle_tol = float(doc.get("oracle_tol", 1e-10))
        if tol <= 0 or oracle_tol <= 0:
            raise ConfigError("tolerances must be positive")
        scan = None
        if "scan" in doc:
            s = doc["scan"]
            scan = ScanSettings(
                variable=parse_variable(str(s["variable"])),
                start=to_fraction(s["start"]),
                stop=to_fraction(s["stop"]),
                steps=int(s["steps"]),
                mode=str(s.get("mode", "free")),
            )
            if scan.steps < 2:
                raise ConfigError("scan needs at least 2 steps")
            if scan.mode not in ("free", "ray"):
                raise ConfigError(f"scan mode {scan.mode!r} must be 'free' or 'ray'")
        return RunConfig(
            spec=spec,
            sectors=sectors,
            shape=shape,
            n_max=int(doc["n_max"]) if "n_max" in doc else None,
            tol=tol,
            oracle_tol=oracle_tol,
            scan=scan,
            modes=doc.get("modes"),
            terms=doc.get("terms"),
            raw=doc,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid configuration: {exc!r}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def config_document(cfg: RunConfig) -> dict:
    """Canonical, re-ingestible form of a configuration."""
    doc: dict = {}
    if cfg.spec is not None:
        doc["hamiltonian"] = cfg.spec.to_dict()
    else:
        doc["q"] = cfg.q
    doc["sectors"] = [{"q": s.q, "r": s.r, "N": s.N} for s in cfg.sectors]
    if cfg.shape is not None:
        doc["shape"] = list(cfg.shape)
    if cfg.n_max is not None:
        doc["n_max"] = cfg.n_max
    doc["tol"] = cfg.tol
    doc["oracle_tol"] = cfg.oracle_tol
    if cfg.scan is not None:
        kind, a, b = cfg.scan.variable
        doc["scan"] = {
            "variable": f"A_{a}_{b}" if kind == "A" else f"eps_{a}",
            "start": str(cfg.scan.start),
            "stop": str(cfg.scan.stop),
            "steps": cfg.scan.steps,
            "mode": cfg.scan.mode,
        }
    if cfg.modes is not None:
        doc["modes"] = cfg.modes
        doc["terms"] = cfg.terms
    return doc
