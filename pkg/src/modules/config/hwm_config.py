"""
Rational Half-Wave Maps configuration - tolerances and run settings
src/modules/config/hwm_config.py

Two layers:
- ToleranceConfig: every numeric threshold used by validation, snapshots and the ODE oracle
- RunConfig: one CLI invocation (command, windows, step, output)
"""

from dataclasses import dataclass, field, asdict, fields
from typing import Dict, Any, Optional
import logging

import numpy as np

logger = logging.getLogger(__name__)

COMMANDS = ("validate", "evolve", "poles", "conserved", "oracle-compare", "soliton-gen")


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric thresholds shared by the whole toolkit."""
    # Constraint predicates
    null_tol: float = 1e-10          # |s·s|
    trace_tol: float = 1e-10         # |Tr M| relative to ‖M‖
    residual_tol: float = 1e-10      # anticommutation / eigen residuals relative to ‖A_j‖
    spin_floor: float = 1e-8         # ‖s_j‖ below this is a spurious pole

    # Geometry guards
    separation_guard: float = 1e-8   # min |x_j - x_k|
    imag_guard: float = 1e-8         # min Im x_j at validation time
    boundary_imag: float = 1e-6      # BoundaryApproach threshold along the flow

    # Linear algebra
    branch_tol: float = 1e-12        # |alpha| cut-over in the half-spin branch rule
    condition_threshold: float = 1e10
    real_tol: float = 1e-8           # imaginary residue allowed in m(t, x)

    def __post_init__(self):
        self._validate_config()

    def _validate_config(self):
        """Validate tolerance values."""
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value}")
        if self.condition_threshold <= 1.0:
            raise ValueError(
                f"condition_threshold must exceed 1, got {self.condition_threshold}"
            )

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


DEFAULT_TOLERANCES = ToleranceConfig()


def get_tolerance_config(base: Optional[ToleranceConfig] = None, **overrides) -> ToleranceConfig:
    """
    Get a tolerance configuration with optional overrides.

    Args:
        base: Configuration to start from (defaults to DEFAULT_TOLERANCES)
        **overrides: Field overrides; None values are ignored

    Returns:
        ToleranceConfig instance
    """
    config_dict = (base or DEFAULT_TOLERANCES).to_dict()
    unknown = [key for key in overrides if key not in config_dict]
    if unknown:
        raise ValueError(f"Unknown tolerance fields: {unknown}. Available: {list(config_dict.keys())}")
    config_dict.update({k: v for k, v in overrides.items() if v is not None})
    return ToleranceConfig(**config_dict)


@dataclass
class RunConfig:
    """Configuration for one CLI command."""
    command: str = "validate"
    input_path: Optional[str] = None

    # Time window
    t0: float = 0.0
    t1: float = 1.0
    nt: int = 11

    # Spatial window
    xmin: float = -10.0
    xmax: float = 10.0
    nx: int = 201

    # ODE oracle
    h: float = 1e-3

    # Output
    output_path: Optional[str] = None
    output_format: str = "csv"

    # Behaviour
    force: bool = False
    seed: Optional[int] = None
    workers: int = 1
    kmax: Optional[int] = None
    n_solitons: int = 1
    velocity: float = 0.0
    phase: float = 0.0

    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        self._validate_config()

    def _validate_config(self):
        """Validate run parameters."""
        if self.command not in COMMANDS:
            raise ValueError(f"command must be one of {COMMANDS}, got {self.command}")
        if self.nt < 1 or self.nx < 1:
            raise ValueError(f"nt and nx must be >= 1, got nt={self.nt}, nx={self.nx}")
        if self.t0 > self.t1:
            raise ValueError(f"t0 ({self.t0}) must not exceed t1 ({self.t1})")
        if not self.xmin < self.xmax:
            raise ValueError(f"xmin ({self.xmin}) must be smaller than xmax ({self.xmax})")
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if self.output_format != "csv":
            raise ValueError(f"output_format must be 'csv', got {self.output_format}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.kmax is not None and self.kmax < 1:
            raise ValueError(f"kmax must be >= 1, got {self.kmax}")
        if self.n_solitons < 1:
            raise ValueError(f"n_solitons must be >= 1, got {self.n_solitons}")
        if not -1.0 < self.velocity < 1.0:
            raise ValueError(f"velocity must lie in (-1, 1), got {self.velocity}")

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)

    def space_grid(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.nx)

    def to_dict(self) -> Dict[str, Any]:
        config_dict = asdict(self)
        config_dict["tolerances"] = self.tolerances.to_dict()
        return config_dict


def get_run_config(command: str = "validate", **kwargs) -> RunConfig:
    """
    Get a run configuration for a command.

    Tolerance overrides may be given flat (``null_tol=1e-9``) and are routed
    into the nested ToleranceConfig.
    """
    tolerance_keys = {f.name for f in fields(ToleranceConfig)}
    tolerance_overrides = {k: kwargs.pop(k) for k in list(kwargs) if k in tolerance_keys}
    tolerances = get_tolerance_config(kwargs.pop("tolerances", None), **tolerance_overrides)
    return RunConfig(command=command, tolerances=tolerances, **kwargs)


def create_config_from_args(args) -> RunConfig:
    """Create a RunConfig from parsed command line arguments."""
    tol = getattr(args, "tol", None)
    overrides = {}
    if tol is not None:
        # --tol scales the constraint predicates together
        overrides.update(null_tol=tol, trace_tol=tol, residual_tol=tol)

    config = get_run_config(
        command=args.command,
        input_path=getattr(args, "input", None),
        t0=getattr(args, "t0", 0.0),
        t1=getattr(args, "t1", 1.0),
        nt=getattr(args, "nt", 11),
        xmin=getattr(args, "xmin", -10.0),
        xmax=getattr(args, "xmax", 10.0),
        nx=getattr(args, "nx", 201),
        h=getattr(args, "h", 1e-3),
        output_path=getattr(args, "out", None),
        force=getattr(args, "force", False),
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", 1),
        kmax=getattr(args, "kmax", None),
        n_solitons=getattr(args, "n_solitons", 1),
        velocity=getattr(args, "velocity", 0.0),
        phase=getattr(args, "phase", 0.0),
        **overrides,
    )
    logger.debug(f"Run configuration: {config.to_dict()}")
    return config
