"""The bundled fixture maps and the generator for the seeded random ones."""

from __future__ import annotations

import random
from importlib import resources

from .parsing import parse_map, render_map
from .polycore import PolyMap, VariableContext

FIXTURES = (
    "pasferme",
    "remark_nonsmooth",
    "remark49",
    "identity",
    "x_xy",
    "linear",
    "squares",
    "random_dominant_1",
    "random_dominant_2",
)

RANDOM_SEEDS = {"random_dominant_1": 11, "random_dominant_2": 29}


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return resources.files("stratkit.fixtures").joinpath(f"{name}.map").read_text()


def load_fixture(name: str) -> PolyMap:
    return parse_map(fixture_text(name))


def random_dominant_map(seed: int, name: str = "") -> PolyMap:
    """A degree-2 map of the plane with small integer coefficients.

    Candidates are drawn until one is dominant and has a non-constant,
    non-zero Jacobian determinant, so that the critical values are a curve.
    """
    from .mapanalysis import is_dominant, jacobian_determinant

    rng = random.Random(seed)
    ctx = VariableContext(("x", "y"))
    monos = ["x^2", "x*y", "y^2", "x", "y"]
    while True:
        comps = []
        for _ in range(2):
            terms = []
            for m in monos:
                c = rng.choice([-2, -1, 0, 0, 1, 1, 2])
                if c:
                    terms.append(f"{c}*{m}")
            comps.append(ctx(" + ".join(terms) if terms else "0"))
        if any(c.is_zero() or c.degree() < 2 for c in comps):
            continue
        F = PolyMap(ctx, ("a1", "a2"), tuple(comps), name)
        det = jacobian_determinant(F)
        if det.is_zero() or det.is_constant():
            continue
        if is_dominant(F):
            return F


def random_fixture_text(name: str) -> str:
    header = f"# degree-2 dominant map, regenerate with random_dominant_map({RANDOM_SEEDS[name]})\n"
    return header + render_map(random_dominant_map(RANDOM_SEEDS[name], name))
