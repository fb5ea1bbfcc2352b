"""Named instances shared by the unit, property and acceptance tests."""
from __future__ import annotations

from quotdeform.deform import flat_problem
from quotdeform.deform.sections import trivial_extension
from quotdeform.fpmod import free_module, present
from quotdeform.poly import QQ, PolyRing, QuotientRing
from quotdeform.quotapp import QuotPoint


def qring(F, names, ideal=()):
    return QuotientRing(PolyRing(F, names), list(ideal))


def dual_numbers(F, order=2, var="e"):
    """(k[e]/(e^order), k[e]/(e^(order+1)))."""
    return qring(F, [var], [f"{var}^{order}"]), qring(F, [var], [f"{var}^{order + 1}"])


def node(F=QQ, a=1, b=1):
    """Second-order lift of the node family (x - a e, y - b e)."""
    B1, B1p = dual_numbers(F)
    B2 = qring(F, ["x", "y"], ["x*y"])
    return flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[[f"x - {a}*e"], [f"y - {b}*e"]],
                        name=f"node({a},{b})")


def node_first_order(F=QQ):
    B1, B1p = dual_numbers(F, order=1)
    B2 = qring(F, ["x", "y"], ["x*y"])
    return flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[["x"], ["y"]], name="node-tangent")


def hilb1_first_order(F=QQ):
    B1, B1p = dual_numbers(F, order=1)
    B2 = qring(F, ["t"])
    return flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[["t"]], name="hilb1-tangent")


def hilb1_second_order(F=QQ):
    B1, B1p = dual_numbers(F)
    B2 = qring(F, ["t"])
    return flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[["t - e"]], name="hilb1-second")


def plane_instance(F=QQ):
    """(x^2, y - e x) in k[x,y] over k[e]/(e^2), lifted to k[e]/(e^3)."""
    B1, B1p = dual_numbers(F)
    B2 = qring(F, ["x", "y"])
    return flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[["x^2"], ["y - e*x"]], name="plane")


TRIVIALIZED = {
    # base variables, I1 relations, I1 generators, B2 variables, rank of E2, N0
    "hilb-line": (["u"], [["u"]], 1, ["t"], 1, [["t - u"]]),
    "parabola": (["u"], [], 1, ["t"], 1, [["t^2 - u"]]),
    "plane-point": (["u", "v"], [["u"], ["v"]], 1, ["x", "y"], 1, [["x - u"], ["y - v"]]),
    "rank-two": (["u", "v"], [["u"], ["v"]], 1, ["t"], 2, [["t - u", "0"], ["-v", "1"]]),
}


def trivialized(key, F=QQ):
    """Lifting over the trivial square-zero extension B1[I1] -> B1."""
    names, i1rels, i1n, b2names, e2n, n0 = TRIVIALIZED[key]
    B1 = qring(F, names)
    I1 = present(B1, i1n, i1rels)
    B1s, B1p = trivial_extension(B1, I1)
    B2 = qring(F, b2names)
    return flat_problem(B1s, B1p, B2, free_module(B2, e2n), n0=n0, name=key)


def point(F, b2names, b2ideal, n0):
    """A point of a Quot scheme: B1 = k."""
    return QuotPoint(qring(F, []), qring(F, b2names, b2ideal), free_module(qring(F, b2names, b2ideal), 1), n0)


def hilb_line_point(F, n):
    return point(F, ["t"], [], [[f"t^{n}"]])


PLANE_MONOMIAL_IDEALS = {
    1: [["x", "y"]],
    2: [["x^2", "y"], ["x", "y^2"]],
    3: [["x^3", "y"], ["x^2", "x*y", "y^2"], ["x", "y^3"]],
    4: [["x^4", "y"], ["x^3", "x*y", "y^2"], ["x^2", "y^2"], ["x^2", "x*y", "y^3"], ["x", "y^4"]],
}


def plane_point(F, gens):
    return point(F, ["x", "y"], [], [[g] for g in gens])


def node_point(F):
    return point(F, ["x", "y"], ["x*y"], [["x"], ["y"]])


def hilb1_universal(F=QQ):
    B1 = qring(F, ["u"])
    B2 = qring(F, ["t"])
    return QuotPoint(B1, B2, free_module(B2, 1), [["t - u"]], name="hilb1-universal")


def hilb1_constant(F=QQ):
    B1 = qring(F, ["u"])
    B2 = qring(F, ["t"])
    return QuotPoint(B1, B2, free_module(B2, 1), [["t"]], name="constant")
