from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import PreconditionError

OUTPUT_DIR_ENV = "ICL_OUTPUT_DIR"


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 4096
    fd_step: float = 1e-3
    root_tol: float = 1e-12
    mu_scan_step: float = 1e-3
    output_dir: Path = Path(".")
    format: str = "json"
    svg: bool = False

    def __post_init__(self):
        if self.grid_n < 64:
            raise PreconditionError(f"grid_n must be >= 64, got {self.grid_n}")
        for name in ("fd_step", "root_tol", "mu_scan_step"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        if self.format not in ("json", "csv"):
            raise PreconditionError(f"unknown format {self.format!r}")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def with_env(self) -> "RunConfig":
        """Apply the ICL_OUTPUT_DIR override if it is set."""
        env = os.environ.get(OUTPUT_DIR_ENV)
        return replace(self, output_dir=Path(env)) if env else self
