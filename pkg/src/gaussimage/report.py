"""Structured results of check runs and their canonical JSON form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _plain(x: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x
    return x


@dataclass
class CheckReport:
    """Verdict of one check plus the evidence behind it.

    ``witnesses`` hold per-set measurements (a failing report always has at
    least one), ``margins`` hold the slack of each numeric criterion, and
    ``table`` carries optional plot-ready rows that are not part of the JSON
    verdict unless requested. ``result`` holds the computed object of
    commands that produce one (a body, a region, a mass).
    """

    check: str
    passed: bool
    witnesses: list[dict] = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    table: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    result: Any = None

    def __post_init__(self):
        if not self.passed and not self.witnesses:
            raise ValueError("a failing report needs at least one witness")

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self) -> bool:
        return self.passed

    def add_witness(self, set_id: str, **values) -> None:
        self.witnesses.append({"set": set_id, "values": values})

    def to_dict(self, with_table: bool = False) -> dict:
        out = {"check": self.check, "verdict": self.verdict,
               "witnesses": self.witnesses, "margins": self.margins}
        if self.config:
            out["config"] = self.config
        if self.result is not None:
            out["result"] = self.result
        if with_table and self.table:
            out["table"] = self.table
        return _plain(out)

    def to_json(self, with_table: bool = False) -> str:
        return json.dumps(self.to_dict(with_table), sort_keys=True, indent=2) + "\n"

    def summary(self) -> str:
        margin = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in sorted(self.margins.items()))
        return f"{self.check}: {self.verdict} ({margin})"


def witness(set_id: str, **values) -> dict:
    return {"set": set_id, "values": values}
