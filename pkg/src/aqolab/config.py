"""Run-wide constants, tolerances and grid densities as one dataclass."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

from .errors import InputError


@dataclass(frozen=True)
class RunConfig:
    # tolerances
    secular_tol: float = 1e-12
    continuity_tol: float = 1e-9          # relative, at certificate seams
    norm_drift_tol: float = 1e-8
    # certificate / schedule constants
    c: float = 0.02                        # spectral-condition threshold
    eta: float = 0.1                       # window bracket constant
    k_offset: float = 0.25                 # resolvent line offset factor
    p: float = 1.5                         # rate exponent, (1, 2]
    eps: float = 0.2                       # target infidelity
    # grid densities
    window_points: int = 101
    right_points: int = 200
    gap_grid: int = 1000
    argmin_grid: int = 10_000
    # brute-force ceilings
    ising_ceiling: int = 24                # qubits for exhaustive Ising enumeration
    sat_ceiling: int = 14                  # total gadget qubits (2n + 2m)
    # evolution
    step_cap: float = 1e-3                 # max step in s
    step_floor: float = 1e-8               # min step in s
    max_steps: int = 200_000_000
    evolve_time_cap: float = 1e4           # total-time cap for integration runs
    # reproducibility
    seed: int = 0

    def __post_init__(self):
        positive = [
            "secular_tol", "continuity_tol", "norm_drift_tol", "c", "eta",
            "k_offset", "eps", "step_cap", "step_floor", "evolve_time_cap",
        ]
        for name in positive:
            if getattr(self, name) <= 0:
                raise InputError(f"config field {name} must be positive")
        if self.c > 0.022:
            raise InputError("spectral-condition constant c must satisfy c <= 0.022")
        if not 1.0 < self.p <= 2.0:
            raise InputError("rate exponent p must lie in (1, 2]")
        if self.eps >= 1.0:
            raise InputError("target infidelity eps must lie in (0, 1)")
        if self.k_offset ** 2 * 8 >= 1.0:
            raise InputError("resolvent offset k must satisfy 8 k^2 < 1")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        bad = set(raw) - known
        if bad:
            raise InputError(f"unknown config keys: {sorted(bad)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = RunConfig()
