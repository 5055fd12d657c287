"""Exact tools for orthant germs, drilling blow-ups, Nash doubles and the surfaces D_s(P_n)."""

from .germs import OrthantGerm, e_value, normalize
from .poly import MPoly

__all__ = ["MPoly", "OrthantGerm", "e_value", "normalize"]
__version__ = "0.1.0"
