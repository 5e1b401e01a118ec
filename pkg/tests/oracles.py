"""Independent checks shared by the test modules.

Nothing here calls the Groebner engine under test: sympy supplies
bases, and points are produced from explicit parametrizations.
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from stratkit.polycore import QQ, Polynomial, VariableContext


def to_sympy(p: Polynomial):
    syms = sympy.symbols(p.ctx.names)
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, e in zip(syms, m):
            term *= s ** e
        expr += term
    return expr


def from_sympy(expr, ctx: VariableContext) -> Polynomial:
    poly = sympy.Poly(expr, *sympy.symbols(ctx.names))
    return Polynomial(ctx, {m: QQ(int(c.p), int(c.q)) for m, c in poly.terms()})


def sympy_basis(gens: list[Polynomial], ctx: VariableContext, order: str = "grevlex") -> set[Polynomial]:
    """Reduced monic basis computed by sympy, as a set of stratkit polynomials."""
    syms = sympy.symbols(ctx.names)
    G = sympy.groebner([to_sympy(g) for g in gens], *syms, order=order)
    return {from_sympy(g, ctx).monic() for g in G.exprs}


def rank_of(rows) -> int:
    return sympy.Matrix([[sympy.Rational(int(v.numerator), int(v.denominator)) for v in r]
                         for r in rows]).rank()


def random_parametrization(rng: random.Random, n_params: int, n_coords: int, degree: int):
    """Coordinates given as random polynomials in t-parameters (strings)."""
    params = [f"t{i + 1}" for i in range(n_params)]
    monos = [""]
    for _ in range(degree):
        monos = sorted(set(monos + [m + ("*" if m else "") + p for m in monos for p in params]))
    monos = [m for m in monos if m.count("*") + 1 <= degree or m == ""]
    coords = []
    for _ in range(n_coords):
        terms = []
        for m in rng.sample(monos, k=min(3, len(monos))):
            c = rng.choice([-3, -2, -1, 1, 2, 3])
            terms.append(f"{c}*{m}" if m else f"{c}")
        coords.append(" + ".join(terms))
    return params, coords


def fraction_point(rng: random.Random, k: int, spread: int = 5) -> list[Fraction]:
    return [Fraction(rng.randint(-spread, spread), rng.randint(1, 3)) for _ in range(k)]
