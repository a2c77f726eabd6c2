"""
Rational Half-Wave Maps Modules
src/modules/__init__.py

Main entry point for the explicit-formula toolkit and its ODE oracle
"""

import logging

logger = logging.getLogger(__name__)

# Import availability flags
ALGEBRA_AVAILABLE = False
CONFIG_AVAILABLE = False
DATASET_AVAILABLE = False
CONSTRAINTS_AVAILABLE = False
LAX_AVAILABLE = False
EVOLUTION_AVAILABLE = False
ORACLE_AVAILABLE = False
GENERATOR_AVAILABLE = False

try:
    from .config.hwm_config import (
        ToleranceConfig,
        RunConfig,
        DEFAULT_TOLERANCES,
        get_tolerance_config,
        get_run_config,
    )
    CONFIG_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Config import failed: {e}")

try:
    from .algebra.spin_algebra import dot, cross, spin_to_matrix, matrix_to_spin
    from .algebra.halfspin import HalfSpinPair, HalfSpinSet, canonical_halfspins, assemble
    ALGEBRA_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Spin algebra import failed: {e}")

try:
    from .datasets.rational_data import RationalData, load_datum, save_datum
    DATASET_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Datum I/O import failed: {e}")

try:
    from .dynamics.constraints import ConstraintReport, validate, single_soliton, initial_velocities
    CONSTRAINTS_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Constraints import failed: {e}")

try:
    from .dynamics.lax import LaxPair, build_lax, conserved_traces, lax_residual
    LAX_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Lax pair import failed: {e}")

try:
    from .evolution.explicit_formula import (
        FrozenEvolution,
        create_frozen_evolution,
        full_field,
        poles_and_spins_at,
    )
    EVOLUTION_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Explicit formula import failed: {e}")

try:
    from .oracle.ode_oracle import Trajectory, integrate_spin_cm, integrate_halfspin, compare
    ORACLE_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ ODE oracle import failed: {e}")

try:
    from .datasets.generators import generate_multi_soliton
    GENERATOR_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Multi-soliton generator import failed: {e}")

# Main exports
__all__ = [
    "ALGEBRA_AVAILABLE",
    "CONFIG_AVAILABLE",
    "DATASET_AVAILABLE",
    "CONSTRAINTS_AVAILABLE",
    "LAX_AVAILABLE",
    "EVOLUTION_AVAILABLE",
    "ORACLE_AVAILABLE",
    "GENERATOR_AVAILABLE",
    "check_environment",
    "get_version_info",
]

if CONFIG_AVAILABLE:
    __all__.extend(["ToleranceConfig", "RunConfig", "DEFAULT_TOLERANCES",
                    "get_tolerance_config", "get_run_config"])
if ALGEBRA_AVAILABLE:
    __all__.extend(["dot", "cross", "spin_to_matrix", "matrix_to_spin",
                    "HalfSpinPair", "HalfSpinSet", "canonical_halfspins", "assemble"])
if DATASET_AVAILABLE:
    __all__.extend(["RationalData", "load_datum", "save_datum"])
if CONSTRAINTS_AVAILABLE:
    __all__.extend(["ConstraintReport", "validate", "single_soliton", "initial_velocities"])
if LAX_AVAILABLE:
    __all__.extend(["LaxPair", "build_lax", "conserved_traces", "lax_residual"])
if EVOLUTION_AVAILABLE:
    __all__.extend(["FrozenEvolution", "create_frozen_evolution", "full_field", "poles_and_spins_at"])
if ORACLE_AVAILABLE:
    __all__.extend(["Trajectory", "integrate_spin_cm", "integrate_halfspin", "compare"])
if GENERATOR_AVAILABLE:
    __all__.append("generate_multi_soliton")


def check_environment():
    """Check if all required components are available"""
    status = {
        'config': CONFIG_AVAILABLE,
        'algebra': ALGEBRA_AVAILABLE,
        'datasets': DATASET_AVAILABLE,
        'constraints': CONSTRAINTS_AVAILABLE,
        'lax': LAX_AVAILABLE,
        'evolution': EVOLUTION_AVAILABLE,
        'oracle': ORACLE_AVAILABLE,
        'generator': GENERATOR_AVAILABLE,
    }
    all_available = all(status.values())
    if all_available:
        logger.info("🎉 All Half-Wave Maps components loaded successfully!")
    else:
        missing = [name for name, available in status.items() if not available]
        logger.warning(f"⚠️ Missing components: {missing}")
    return {'components': status, 'all_available': all_available}


def get_version_info():
    """Get version and component information"""
    return {
        'hwm_implementation': 'explicit_resolvent_v1',
        'commands': ['validate', 'evolve', 'poles', 'conserved', 'oracle-compare', 'soliton-gen'],
        'components': check_environment()['components'],
        'features': [
            'explicit_resolvent_formula',
            'hardy_space_representation',
            'lax_pair_isospectrality',
            'halfspin_transport',
            'rk4_spin_calogero_moser_oracle',
            'multi_soliton_generator',
        ],
    }
