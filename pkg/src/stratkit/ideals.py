"""Ideals over QQ[x]: Buchberger's algorithm and the operations built on it.

The engine works on dictionaries keyed by order-embedded monomials (see
``polycore.Embedding``): ``max`` on the keys is the leading monomial and
monomial products are componentwise sums.  Pair handling follows
Gebauer-Moeller (both Buchberger criteria); pairs are selected by sugar
degree first and leading monomial second, which keeps elimination orders
from chasing high-degree pairs early.  Every reduction step is charged against a step budget.
"""

from __future__ import annotations

import contextlib
import itertools
import os
import threading
import time
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from gmpy2 import gcd, lcm as ilcm, mpq, mpz

from .polycore import (
    GREVLEX, Embedding, MonomialOrder, Polynomial, VariableContext, block_order, squarefree_part,
)

DEFAULT_BUDGET = 10 ** 7


class ResourceLimitError(RuntimeError):
    """A computation exceeded its reduction-step budget."""


class StepBudget:
    """Reduction-step cap, optionally with a wall-clock deadline in seconds."""

    def __init__(self, limit: int | None = None, seconds: float | None = None):
        if limit is None:
            limit = int(os.environ.get("STRATKIT_BUDGET", DEFAULT_BUDGET))
        self.limit = limit
        self.used = 0
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self._lock = threading.Lock()

    def charge(self, n: int = 1):
        with self._lock:
            self.used += n
            if self.used > self.limit:
                raise ResourceLimitError(f"reduction step budget of {self.limit} exceeded")
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise ResourceLimitError("time limit exceeded")


_budget: ContextVar[StepBudget | None] = ContextVar("stratkit_budget", default=None)
_check: ContextVar[list | None] = ContextVar("stratkit_check_bases", default=None)


@contextlib.contextmanager
def step_budget(limit: int | None = None, seconds: float | None = None):
    """Share one reduction-step budget across everything run in the block."""
    b = StepBudget(limit, seconds)
    tok = _budget.set(b)
    try:
        yield b
    finally:
        _budget.reset(tok)


@contextlib.contextmanager
def checking_bases():
    """Verify (and collect) every Groebner basis computed inside the block."""
    seen: list[GroebnerBasis] = []
    tok = _check.set(seen)
    try:
        yield seen
    finally:
        _check.reset(tok)


def _active_budget() -> StepBudget:
    return _budget.get() or StepBudget()


# ---------------------------------------------------------------------------
# engine on embedded dictionaries
# ---------------------------------------------------------------------------

class _Engine:
    def __init__(self, emb: Embedding, budget: StepBudget):
        self.emb = emb
        self.var_pos = emb.var_pos
        self.budget = budget

    def exps(self, e):
        return tuple(s * e[i] for i, s in self.var_pos)

    def reduce(self, f: dict, basis: list[tuple]) -> dict:
        """Full reduction of f by monic basis entries (lm_emb, lm_exps, tail)."""
        f = dict(f)
        rem = {}
        charge = self.budget.charge
        while f:
            m = max(f)
            c = f.pop(m)
            mx = self.exps(m)
            for lm, lx, tail in basis:
                if all(a >= b for a, b in zip(mx, lx)):
                    break
            else:
                rem[m] = c
                continue
            charge()
            u = tuple(a - b for a, b in zip(m, lm))
            for e, a in tail:
                k = tuple(x + y for x, y in zip(e, u))
                v = f.get(k, 0) - c * a
                if v:
                    f[k] = v
                else:
                    f.pop(k, None)
        return rem

    @staticmethod
    def monic(f: dict) -> dict:
        lc = f[max(f)]
        if lc == 1:
            return f
        return {m: c / lc for m, c in f.items()}

    def entry(self, f: dict) -> tuple:
        lm = max(f)
        return lm, self.exps(lm), [(e, c) for e, c in f.items() if e != lm]

    def spoly(self, f: dict, g: dict) -> dict:
        lf, lg = max(f), max(g)
        fx, gx = self.exps(lf), self.exps(lg)
        lcm = self.emb.embed(tuple(max(a, b) for a, b in zip(fx, gx)))
        uf = tuple(a - b for a, b in zip(lcm, lf))
        ug = tuple(a - b for a, b in zip(lcm, lg))
        out = {}
        for e, c in f.items():
            out[tuple(x + y for x, y in zip(e, uf))] = c
        for e, c in g.items():
            k = tuple(x + y for x, y in zip(e, ug))
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return out

    # Buchberger runs on primitive integer polynomials: fraction-free
    # reduction avoids the denominators that monic rational bases pile up.

    @staticmethod
    def primitive(f: dict) -> dict:
        """Scale to integer coefficients with content 1 and a positive leading coefficient."""
        den = mpz(1)
        for c in f.values():
            den = ilcm(den, mpq(c).denominator)
        out = {m: mpq(c).numerator * (den // mpq(c).denominator) for m, c in f.items()}
        g = mpz(0)
        for c in out.values():
            g = gcd(g, c)
            if g == 1:
                break
        if out[max(out)] < 0:
            g = -g
        if g != 1:
            out = {m: c // g for m, c in out.items()}
        return out

    def int_entry(self, f: dict) -> tuple:
        lm = max(f)
        return lm, self.exps(lm), f[lm], [(e, c) for e, c in f.items() if e != lm]

    def reduce_int(self, f: dict, basis: list[tuple]) -> dict:
        """Fraction-free full reduction; the result is a nonzero integer multiple of the true remainder."""
        f = dict(f)
        rem = {}
        charge = self.budget.charge
        steps = 0
        while f:
            m = max(f)
            c = f.pop(m)
            mx = self.exps(m)
            for lm, lx, a, tail in basis:
                if all(x >= y for x, y in zip(mx, lx)):
                    break
            else:
                rem[m] = c
                continue
            charge()
            g = gcd(a, c)
            fa, fc = a // g, c // g
            if fa != 1:
                for k in f:
                    f[k] *= fa
                for k in rem:
                    rem[k] *= fa
            u = tuple(x - y for x, y in zip(m, lm))
            for e, b in tail:
                k = tuple(x + y for x, y in zip(e, u))
                v = f.get(k, 0) - fc * b
                if v:
                    f[k] = v
                else:
                    f.pop(k, None)
            steps += 1
            if steps % 8 == 0:
                cont = mpz(0)
                for v in itertools.chain(f.values(), rem.values()):
                    cont = gcd(cont, v)
                    if cont == 1:
                        break
                if cont > 1:
                    f = {k: v // cont for k, v in f.items()}
                    rem = {k: v // cont for k, v in rem.items()}
        return rem

    def spoly_int(self, f: dict, g: dict) -> dict:
        lf, lg = max(f), max(g)
        a, b = f[lf], g[lg]
        d = gcd(a, b)
        ca, cb = b // d, a // d
        fx, gx = self.exps(lf), self.exps(lg)
        lcm = self.emb.embed(tuple(max(x, y) for x, y in zip(fx, gx)))
        uf = tuple(x - y for x, y in zip(lcm, lf))
        ug = tuple(x - y for x, y in zip(lcm, lg))
        out = {}
        for e, c in f.items():
            out[tuple(x + y for x, y in zip(e, uf))] = ca * c
        for e, c in g.items():
            k = tuple(x + y for x, y in zip(e, ug))
            v = out.get(k, 0) - cb * c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return out

    def buchberger(self, polys: list[dict]) -> list[dict]:
        store: list[dict] = []
        lmx: list[tuple] = []
        sugar: list[int] = []
        active: list[int] = []
        pairs: list[tuple[tuple, int, int]] = []

        def lcm(i, j):
            return tuple(max(a, b) for a, b in zip(lmx[i], lmx[j]))

        def divides(a, b):
            return all(x <= y for x, y in zip(a, b))

        def coprime(i, j):
            return all(not (a and b) for a, b in zip(lmx[i], lmx[j]))

        def basis_view():
            return [self.int_entry(store[k]) for k in active]

        def update(h):
            nonlocal active, pairs
            cands = list(active)
            keep = []
            while cands:
                g1 = cands.pop(0)
                l1 = lcm(h, g1)
                if coprime(h, g1) or (
                        not any(divides(lcm(h, g2), l1) for g2 in cands)
                        and not any(divides(lcm(h, g2), l1) for g2 in keep)):
                    keep.append(g1)
            new_pairs = []
            for g in keep:
                if coprime(h, g):
                    continue
                l = lcm(g, h)
                d = sum(l)
                sug = max(sugar[g] + d - sum(lmx[g]), sugar[h] + d - sum(lmx[h]))
                new_pairs.append(((sug, self.emb.embed(l)), g, h))
            survivors = []
            for key, g1, g2 in pairs:
                l12 = lcm(g1, g2)
                if divides(lmx[h], l12) and lcm(g1, h) != l12 and lcm(g2, h) != l12:
                    continue
                survivors.append((key, g1, g2))
            pairs = survivors + new_pairs
            active = [g for g in active if not divides(lmx[h], lmx[g])] + [h]

        def add(f, sug):
            f = self.primitive(f)
            store.append(f)
            lmx.append(self.exps(max(f)))
            sugar.append(max(sug, max(sum(self.exps(e)) for e in f)))
            update(len(store) - 1)

        view = []
        for f in sorted((self.primitive(p) for p in polys if p), key=max):
            h = self.reduce_int(f, view)
            if h:
                add(h, 0)
                view = basis_view()
                if not any(lmx[-1]):
                    return [{max(h): mpq(1)}]
        while pairs:
            best = min(range(len(pairs)), key=pairs.__getitem__)
            (sug, _), i, j = pairs.pop(best)
            s = self.spoly_int(store[i], store[j])
            if not s:
                continue
            h = self.reduce_int(s, view)
            if h:
                add(h, sug)
                view = basis_view()
                if not any(lmx[-1]):
                    return [{max(h): mpq(1)}]
        # inter-reduce the minimal basis; leading terms are irreducible, so they survive
        out = []
        for k in active:
            others = [self.int_entry(store[o]) for o in active if o != k]
            red = self.reduce_int(store[k], others)
            lc = red[max(red)]
            out.append({m: mpq(c, lc) for m, c in red.items()})
        out.sort(key=max, reverse=True)
        return out


def _to_emb(p: Polynomial, emb: Embedding) -> dict:
    return {emb.embed(m): c for m, c in p.terms.items()}


def _from_emb(d: dict, ctx: VariableContext) -> Polynomial:
    emb = ctx.embedding
    return Polynomial(ctx, {emb.unembed(e): c for e, c in d.items()}, _trusted=True)


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis: monic, inter-reduced, sorted by leading monomial."""

    ctx: VariableContext  # carries the monomial order
    elements: tuple[Polynomial, ...]

    @property
    def order(self) -> MonomialOrder:
        return self.ctx.order

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.elements)

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [g.lm() for g in self.elements]

    def reduce(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


class Ideal:
    """Finitely generated ideal with a write-once basis cache per order."""

    __slots__ = ("ctx", "generators", "_bases", "_lock", "__weakref__")

    def __init__(self, ctx: VariableContext, generators: Iterable[Polynomial] = ()):
        self.ctx = ctx
        gens, seen = [], set()
        for g in generators:
            if not g.ctx.same_vars(ctx):
                g = g.to_ctx(ctx)
            if g.is_zero():
                continue
            if g.ctx is not ctx:
                g = g.to_ctx(ctx)
            if g not in seen:
                seen.add(g)
                gens.append(g)
        self.generators: tuple[Polynomial, ...] = tuple(gens)
        self._bases: dict[MonomialOrder, GroebnerBasis] = {}
        self._lock = threading.Lock()

    @classmethod
    def unit(cls, ctx: VariableContext) -> "Ideal":
        return cls(ctx, [ctx.one()])

    @classmethod
    def zero(cls, ctx: VariableContext) -> "Ideal":
        return cls(ctx, [])

    @classmethod
    def from_strings(cls, ctx: VariableContext, gens: Sequence[str]) -> "Ideal":
        return cls(ctx, [ctx(g) for g in gens])

    def groebner(self, order: MonomialOrder | None = None) -> GroebnerBasis:
        return groebner(self, order)

    def _seed(self, gb: GroebnerBasis):
        with self._lock:
            self._bases.setdefault(gb.order, gb)

    def is_unit(self) -> bool:
        if any(g.is_constant() for g in self.generators):
            return True
        return self.groebner().is_unit()

    def is_zero(self) -> bool:
        return not self.generators

    def reduced(self) -> "Ideal":
        """Same ideal generated by its reduced Groebner basis."""
        gb = self.groebner()
        out = Ideal(self.ctx, [g.to_ctx(self.ctx) for g in gb.elements])
        out._seed(gb)
        return out

    def to_ctx(self, ctx: VariableContext) -> "Ideal":
        return Ideal(ctx, [g.to_ctx(ctx) for g in self.generators])

    def __add__(self, other):
        if isinstance(other, Ideal):
            other = other.generators
        elif isinstance(other, Polynomial):
            other = [other]
        return Ideal(self.ctx, list(self.generators) + [g.to_ctx(self.ctx) for g in other])

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ctx, [a * b.to_ctx(self.ctx) for a in self.generators for b in other.generators])

    def __contains__(self, p: Polynomial) -> bool:
        return member(p, self)

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.ctx.names == other.ctx.names
                and self.generators == other.generators)

    def __hash__(self):
        return hash((self.ctx.names, self.generators))

    def __repr__(self):
        return f"Ideal<{', '.join(map(str, self.generators)) or '0'}>"

    def strings(self) -> list[str]:
        return [str(g) for g in self.generators]


def groebner(I: Ideal, order: MonomialOrder | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``I`` (cached on the ideal)."""
    order = order or I.ctx.order
    cached = I._bases.get(order)
    if cached is not None:
        return cached
    with I._lock:
        cached = I._bases.get(order)
        if cached is not None:
            return cached
        ctx = I.ctx.with_order(order)
        emb = ctx.embedding
        eng = _Engine(emb, _active_budget())
        raw = eng.buchberger([_to_emb(g, emb) for g in I.generators])
        gb = GroebnerBasis(ctx, tuple(_from_emb(d, ctx) for d in raw))
        seen = _check.get()
        if seen is not None:
            if not is_groebner(gb):
                raise AssertionError("Buchberger postcondition failed")
            seen.append(gb)
        I._bases[order] = gb
        return gb


def is_groebner(G: GroebnerBasis) -> bool:
    """Every S-polynomial reduces to zero (no criteria applied)."""
    emb = G.ctx.embedding
    eng = _Engine(emb, StepBudget(10 ** 12))
    polys = [_to_emb(g, emb) for g in G.elements]
    basis = [eng.entry(eng.monic(p)) for p in polys if p]
    for f, g in combinations(polys, 2):
        if eng.reduce(eng.spoly(f, g), basis):
            return False
    return True


def is_reduced(G: GroebnerBasis) -> bool:
    """Monic, and no term of an element is divisible by another leading monomial."""
    lms = G.leading_monomials()
    for k, g in enumerate(G.elements):
        if g.lc() != 1:
            return False
        for i, lm in enumerate(lms):
            if i == k:
                continue
            if any(all(a >= b for a, b in zip(m, lm)) for m, _ in g.items()):
                return False
    return True


def normal_form(p: Polynomial, G: GroebnerBasis) -> Polynomial:
    if not p.ctx.same_vars(G.ctx):
        from .polycore import ContextMismatchError
        raise ContextMismatchError(f"{p.ctx.names} vs {G.ctx.names}")
    emb = G.ctx.embedding
    eng = _Engine(emb, _active_budget())
    basis = [eng.entry(_to_emb(g, emb)) for g in G.elements]
    rem = eng.reduce(_to_emb(p, emb), basis)
    return _from_emb(rem, G.ctx).to_ctx(p.ctx)


def member(p: Polynomial, I: Ideal) -> bool:
    if p.is_zero():
        return True
    return normal_form(p.to_ctx(I.ctx) if not p.ctx.same_vars(I.ctx) else p, groebner(I)).is_zero()


def is_unit(I: Ideal) -> bool:
    return I.is_unit()


def _extended(I: Ideal, stem: str = "_t") -> tuple[VariableContext, str]:
    t = I.ctx.fresh(stem)
    return I.ctx.extend(t), t


def radical_member(p: Polynomial, I: Ideal) -> bool:
    """p vanishes on V(I)  <=>  1 in I + <1 - t p>."""
    if not p.ctx.same_vars(I.ctx):
        p = p.to_ctx(I.ctx)
    return _radical_member(p, I)


@lru_cache(maxsize=65536)
def _radical_member(p: Polynomial, I: Ideal) -> bool:
    if p.is_zero() or I.is_unit():
        return True
    if member(p, I):
        return True
    gb = groebner(I)
    if len(gb.elements) == 1:
        # principal: p vanishes on V(f) iff the square-free part of f divides p
        f = squarefree_part(gb.elements[0].to_ctx(I.ctx))
        return member(p, Ideal(I.ctx, [f]))
    D = _standard_monomial_count(gb)
    if D is not None:
        # finite V(I): p is nilpotent modulo I iff p^D is in I, D = dim Q[x]/I
        q, k = normal_form(p, gb), 1
        while k < D and not q.is_zero():
            q = normal_form(q * q, gb)
            k *= 2
        return q.is_zero()
    ctx, t = _extended(I)
    J = Ideal(ctx, [g.to_ctx(ctx) for g in I.generators] + [ctx.one() - ctx.var(t) * p.to_ctx(ctx)])
    return J.is_unit()


def _standard_monomial_count(gb: GroebnerBasis) -> int | None:
    """dim_Q of the quotient ring when it is finite, else None."""
    lms = gb.leading_monomials()
    n = gb.ctx.arity
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and sum(m) == m[i]]
        if not pure:
            return None
        bounds.append(min(pure))
    count = 0
    stack = [(0,) * n]
    seen = {stack[0]}
    while stack:
        m = stack.pop()
        if any(all(a >= b for a, b in zip(m, lm)) for lm in lms):
            continue
        count += 1
        for i in range(n):
            nm = m[:i] + (m[i] + 1,) + m[i + 1:]
            if nm[i] < bounds[i] and nm not in seen:
                seen.add(nm)
                stack.append(nm)
    return count


def eliminate(I: Ideal, drop_vars: Iterable[str]) -> Ideal:
    """I intersected with the subring of the remaining variables.

    The result lives in a ring of the kept variables (original order of
    names); its generators are a reduced Groebner basis there.
    """
    drop = [v for v in I.ctx.names if v in set(drop_vars)]
    missing = set(drop_vars) - set(I.ctx.names)
    if missing:
        raise KeyError(f"unknown variables {sorted(missing)}")
    keep_ctx = I.ctx.drop(drop)
    if not drop:
        return Ideal(keep_ctx, I.generators)
    if I.is_zero():
        return Ideal.zero(keep_ctx)
    kept = list(keep_ctx.names)
    inner = keep_ctx.order if keep_ctx.order.kind != "block" else GREVLEX
    work = VariableContext(tuple(drop) + tuple(kept), block_order(len(drop), GREVLEX, inner))
    J = Ideal(work, [g.to_ctx(work) for g in I.generators])
    gb = groebner(J, work.order)
    dropped_idx = range(len(drop))
    elim = [g for g in gb.elements if all(not any(m[i] for i in dropped_idx) for m, _ in g.items())]
    out = Ideal(keep_ctx, [g.to_ctx(keep_ctx) for g in elim])
    out._seed(GroebnerBasis(keep_ctx.with_order(inner), tuple(g.to_ctx(keep_ctx.with_order(inner)) for g in elim)))
    return out


def saturate(I: Ideal, f: Polynomial) -> Ideal:
    """I : f^infinity, via elimination of t from I + <1 - t f>."""
    if f.is_zero():
        raise ValueError("saturation by the zero polynomial")
    if f.is_constant() or I.is_unit():
        return I.reduced() if not I.is_unit() else Ideal.unit(I.ctx)
    ctx, t = _extended(I)
    J = Ideal(ctx, [g.to_ctx(ctx) for g in I.generators] + [ctx.one() - ctx.var(t) * f.to_ctx(ctx)])
    return _relabel(eliminate(J, [t]), I.ctx)


def _relabel(J: Ideal, ctx: VariableContext) -> Ideal:
    out = Ideal(ctx, [g.to_ctx(ctx) for g in J.generators])
    for gb in J._bases.values():
        c2 = ctx.with_order(gb.order)
        out._seed(GroebnerBasis(c2, tuple(g.to_ctx(c2) for g in gb.elements)))
    return out


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """I cap J = (t I + (1 - t) J) cap k[x]."""
    if I.is_unit():
        return J
    if J.is_unit():
        return I
    if I.is_zero() or J.is_zero():
        return Ideal.zero(I.ctx)
    ctx, t = _extended(I)
    tv = ctx.var(t)
    gens = [tv * g.to_ctx(ctx) for g in I.generators]
    gens += [(ctx.one() - tv) * g.to_ctx(ctx) for g in J.generators]
    return _relabel(eliminate(Ideal(ctx, gens), [t]), I.ctx)


def intersect_all(ideals: Sequence[Ideal], ctx: VariableContext) -> Ideal:
    out = Ideal.unit(ctx)
    for J in ideals:
        out = intersect(out, J)
    return out


def saturate_by_ideal(I: Ideal, J: Ideal) -> Ideal:
    """I : J^infinity as the intersection of the saturations by each generator."""
    if J.is_zero():
        return Ideal.unit(I.ctx)
    return intersect_all([saturate(I, g) for g in J.generators], I.ctx)


def dimension(I: Ideal) -> int:
    """Krull dimension of V(I): largest set of variables independent modulo in(I)."""
    if I.is_zero():
        return I.ctx.arity
    gb = groebner(I)
    if gb.is_unit():
        return -1
    n = I.ctx.arity
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def max_independent_set(I: Ideal) -> tuple[str, ...]:
    """Variables of one maximal independent set modulo the leading-term ideal."""
    gb = groebner(I)
    if gb.is_unit():
        return ()
    n = I.ctx.arity
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            if not any(sup <= set(subset) for sup in supports):
                return tuple(I.ctx.names[i] for i in subset)
    return ()


def ideal_containment(I: Ideal, J: Ideal, mode: str = "exact") -> bool:
    """exact: J subset of I as ideals.  up-to-radical: V(I) subset of V(J).

    The radical mode tests every generator of J for radical membership in
    I, which decides V(I) contained in V(J).
    """
    if mode == "exact":
        return all(member(g, I) for g in J.generators)
    if mode in ("up-to-radical", "radical"):
        return all(radical_member(g, I) for g in J.generators)
    raise ValueError(f"unknown containment mode {mode!r}")


def variety_subset(I: Ideal, J: Ideal) -> bool:
    """V(I) is contained in V(J)."""
    return ideal_containment(I, J, "up-to-radical")


def same_variety(I: Ideal, J: Ideal) -> bool:
    return variety_subset(I, J) and variety_subset(J, I)


def product_all(ideals: Sequence[Ideal], ctx: VariableContext) -> Ideal:
    out = Ideal.unit(ctx)
    for J in ideals:
        out = out * J
    return out
