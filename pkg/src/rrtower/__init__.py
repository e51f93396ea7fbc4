"""Riemann-Roch bases, Weierstrass semigroups and one-point AG codes on the
tower x_{j+1}^2 = (x_j^2 + 1)/(2 x_j) over F_{p^2}."""

from .field import FieldCtx, Fq2Elem, make_field_ctx
from .ladder import MasterLadder, basis, dim, master_ladder
from .tower import genus

__version__ = "0.1.0"

__all__ = ["FieldCtx", "Fq2Elem", "make_field_ctx", "MasterLadder", "basis", "dim", "master_ladder", "genus"]
