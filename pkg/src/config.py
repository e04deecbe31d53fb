import math
import os
from dataclasses import dataclass
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

@dataclass
class Config:
    # Concurrency
    threads: int = int(os.getenv("NONLOCAL_EVOLVE_THREADS", "1"))

    # Solver defaults
    default_smoothness_alpha: float = float(os.getenv("DEFAULT_SMOOTHNESS_ALPHA", "0.5"))
    default_mode: str = os.getenv("DEFAULT_MODE", "uniform")
    default_c1: float = float(os.getenv("DEFAULT_C1", "1.0"))
    default_phi: float = float(os.getenv("DEFAULT_PHI", str(math.pi / 6)))
    resolvent_margin: float = float(os.getenv("RESOLVENT_MARGIN", "0.05"))

    # Artifacts
    default_out_dir: str = os.getenv("DEFAULT_OUT_DIR", "./out")

    # Logging
    log_level: str = os.getenv("LOG_LEVEL", "INFO")

    def validate(self):
        if self.threads < 1:
            raise ValueError(f"NONLOCAL_EVOLVE_THREADS must be >= 1, got {self.threads}")
        if not 0.0 < self.resolvent_margin < 1.0:
            raise ValueError(f"RESOLVENT_MARGIN must lie in (0, 1), got {self.resolvent_margin}")
        if not 0.0 < self.default_phi < math.pi / 2:
            raise ValueError(f"DEFAULT_PHI must lie in (0, pi/2), got {self.default_phi}")
        if not 0.0 < self.default_smoothness_alpha <= 1.0:
            raise ValueError(
                f"DEFAULT_SMOOTHNESS_ALPHA must lie in (0, 1], got {self.default_smoothness_alpha}"
            )
        Path(self.default_out_dir).mkdir(parents=True, exist_ok=True)

config = Config()
