"""Exact certificates and bounds for the border subrank of algebra structure tensors."""

__version__ = "0.1.0"
