"""
Half-Wave Maps Utils Module
src/modules/utils/__init__.py
"""

import logging

logger = logging.getLogger(__name__)

# Import availability flag
UTILS_AVAILABLE = False

try:
    from .errors import (
        HWMError,
        BoundaryApproachWarning,
        SchemaError,
        ValidationFailed,
    )
    from .table_writer import write_table, format_value
    UTILS_AVAILABLE = True
except ImportError as e:
    logger.error(f"❌ Failed to import utils: {e}")
    write_table = None
    format_value = None

# Main exports
__all__ = [
    "UTILS_AVAILABLE",
]

if UTILS_AVAILABLE:
    __all__.extend([
        "HWMError",
        "BoundaryApproachWarning",
        "SchemaError",
        "ValidationFailed",
        "write_table",
        "format_value",
    ])
