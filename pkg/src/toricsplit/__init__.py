"""Exact workbench for smooth projective toric varieties: diagonal
resolution terms, line bundle cohomology, and Horrocks-type splitting
checks, all in integer/rational arithmetic."""

__version__ = "0.1.0"

from .toric import (  # noqa: F401
    Fan,
    PicBasis,
    ValidationReport,
    canonical_divisor,
    divisor_class,
    hirzebruch,
    is_ample,
    is_ample_class,
    is_effective_class,
    is_nef,
    is_nef_class,
    pic_basis,
    product_fan,
    projective_space,
    validate_fan,
)
