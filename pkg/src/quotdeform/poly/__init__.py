from .field import ExactField, GF, QQ
from .ring import (GREVLEX, LEX, MonomialOrder, Polynomial, PolynomialSyntaxError, PolyRing,
                   StructuralError)
from .quotient import (GroebnerIdeal, QuotientRing, RingMap, coproduct_ring, groebner_basis,
                       inclusion, normal_form, syzygies)

__all__ = [
    "ExactField", "GF", "QQ", "GREVLEX", "LEX", "MonomialOrder", "Polynomial",
    "PolynomialSyntaxError", "PolyRing", "StructuralError", "GroebnerIdeal", "QuotientRing",
    "RingMap", "coproduct_ring", "groebner_basis", "inclusion", "normal_form", "syzygies",
]
