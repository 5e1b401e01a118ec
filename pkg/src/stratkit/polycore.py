"""Exact sparse multivariate polynomials over QQ.

Monomials are exponent tuples, coefficients are ``gmpy2.mpq``.  Monomial
orders are described by integer weight matrices so that every order used
here (lex, grevlex and block products of those) embeds monomials into
tuples whose natural comparison is the order itself.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

from gmpy2 import mpq

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction, "mpq"]
_MPQ = type(mpq(0))

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ContextMismatchError(ValueError):
    """Operands live in rings with different variables."""


def QQ(value, den=None) -> mpq:
    """Coerce ``value`` (int, Fraction, mpq, 'p/q' string) to an mpq."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: ``lex``, ``grevlex`` or ``block``.

    A block order compares the first ``split`` variables with ``inner[0]``
    and breaks ties on the remaining ones with ``inner[1]``.
    """

    kind: str = "grevlex"
    split: int = 0
    inner: tuple["MonomialOrder", ...] = ()

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and (self.split < 1 or len(self.inner) != 2):
            raise ValueError("block order needs split >= 1 and two inner orders")

    def weight_rows(self, n: int) -> list[tuple[int, ...]]:
        """Rows of an integer matrix M with m < m' iff M m < M m' (lexicographically)."""
        if self.kind == "lex":
            return [tuple(int(i == j) for j in range(n)) for i in range(n)]
        if self.kind == "grevlex":
            rows = [tuple([1] * n)]
            rows += [tuple(-int(i == j) for j in range(n)) for i in reversed(range(n))]
            return rows
        if self.split >= n:
            raise ValueError(f"block split {self.split} must be < arity {n}")
        k = self.split
        first = [row + (0,) * (n - k) for row in self.inner[0].weight_rows(k)]
        second = [(0,) * k + row for row in self.inner[1].weight_rows(n - k)]
        return first + second

    def __str__(self):
        if self.kind == "block":
            return f"block({self.split}, {self.inner[0]}, {self.inner[1]})"
        return self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def block_order(split: int, first: MonomialOrder = GREVLEX,
                second: MonomialOrder = GREVLEX) -> MonomialOrder:
    return MonomialOrder("block", split, (first, second))


class Embedding:
    """Linear embedding of exponent vectors realising a monomial order.

    ``embed(m)`` is a tuple whose comparison is the monomial order; product
    of monomials is componentwise addition in either coordinate system.
    Every order here has, for each variable, a row equal to +-e_i, which
    makes the embedding invertible cheaply.
    """

    def __init__(self, order: MonomialOrder, n: int):
        self.n = n
        self.rows = order.weight_rows(n)
        self.sparse_rows = [tuple((j, w) for j, w in enumerate(r) if w) for r in self.rows]
        pos = {}
        for idx, row in enumerate(self.rows):
            nz = [(j, w) for j, w in enumerate(row) if w]
            if len(nz) == 1 and abs(nz[0][1]) == 1 and nz[0][0] not in pos:
                pos[nz[0][0]] = (idx, nz[0][1])
        if len(pos) != n:
            raise ValueError("order is not invertible by unit rows")
        self.var_pos = [pos[i] for i in range(n)]

    def embed(self, m: Monomial) -> tuple[int, ...]:
        return tuple(sum(w * m[j] for j, w in r) for r in self.sparse_rows)

    def unembed(self, e: tuple[int, ...]) -> Monomial:
        return tuple(s * e[i] for i, s in self.var_pos)


# ---------------------------------------------------------------------------
# rings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariableContext:
    """Ordered variable names plus the active monomial order."""

    names: tuple[str, ...]
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for nm in self.names:
            if not _IDENT.match(nm):
                raise ValueError(f"invalid variable identifier {nm!r}")
        if self.order.kind == "block" and self.order.split >= len(self.names):
            raise ValueError("block split index must be smaller than the arity")

    @property
    def arity(self) -> int:
        return len(self.names)

    @cached_property
    def embedding(self) -> Embedding:
        return Embedding(self.order, len(self.names))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {nm: i for i, nm in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} (ring has {', '.join(self.names)})") from None

    def same_vars(self, other: "VariableContext") -> bool:
        return self.names == other.names

    def with_order(self, order: MonomialOrder) -> "VariableContext":
        return VariableContext(self.names, order)

    def extend(self, *names: str) -> "VariableContext":
        order = self.order if self.order.kind != "block" else GREVLEX
        return VariableContext(self.names + tuple(names), order)

    def drop(self, names: Iterable[str]) -> "VariableContext":
        gone = set(names)
        order = self.order if self.order.kind != "block" else GREVLEX
        return VariableContext(tuple(n for n in self.names if n not in gone), order)

    def fresh(self, stem: str = "_t") -> str:
        """A variable name not used in this ring."""
        i = 0
        while f"{stem}{i}" in self._index:
            i += 1
        return f"{stem}{i}"

    def var(self, name: str) -> "Polynomial":
        i = self.index(name)
        return Polynomial(self, {tuple(int(j == i) for j in range(self.arity)): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(n) for n in self.names]

    def const(self, c: Scalar) -> "Polynomial":
        return Polynomial(self, {(0,) * self.arity: c})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def __call__(self, text: str) -> "Polynomial":
        from .parsing import parse_polynomial
        return parse_polynomial(text, self)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to mpq."""

    __slots__ = ("ctx", "_terms", "_hash", "_sorted")

    def __init__(self, ctx: VariableContext, terms: Mapping[Monomial, Scalar] = (), *, _trusted=False):
        self.ctx = ctx
        if _trusted:
            self._terms = terms
        else:
            n = ctx.arity
            clean = {}
            for m, c in dict(terms).items():
                m = tuple(m)
                if len(m) != n:
                    raise ValueError(f"monomial {m} has wrong length for {n} variables")
                c = QQ(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
            self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None
        self._sorted = None

    # -- basic accessors -----------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, mpq]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, mpq]]:
        """Terms sorted strictly descending in the ring's monomial order."""
        if self._sorted is None:
            emb = self.ctx.embedding.embed
            self._sorted = sorted(self._terms.items(), key=lambda t: emb(t[0]), reverse=True)
        return list(self._sorted)

    def __iter__(self) -> Iterator[tuple[Monomial, mpq]]:
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self.ctx.arity, mpq(0))

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no degree")
        return max(sum(m) for m in self._terms)

    def lm(self) -> Monomial:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading monomial")
        return self.items()[0][0]

    def lc(self) -> mpq:
        return self.items()[0][1]

    def variables(self) -> set[str]:
        used = set()
        for m in self._terms:
            used.update(self.ctx.names[i] for i, e in enumerate(m) if e)
        return used

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if not self.ctx.same_vars(other.ctx):
                raise ContextMismatchError(f"{self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, (int, Fraction, _MPQ)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self.ctx, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {m: -c for m, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, mpq] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Polynomial(self.ctx, out, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant():
                return self.exact_div(other)
            other = other.constant_value()
        other = QQ(other)
        if not other:
            raise ZeroDivisionError("division by zero")
        return Polynomial(self.ctx, {m: c / other for m, c in self._terms.items()}, _trusted=True)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = self.ctx.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx.same_vars(other.ctx) and self._terms == other._terms
        if isinstance(other, (int, Fraction, _MPQ)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self._terms.items())))
        return self._hash

    def monic(self) -> "Polynomial":
        return self / self.lc() if self._terms else self

    def exact_div(self, d: "Polynomial") -> "Polynomial":
        """Quotient of an exact division; raises if ``d`` does not divide self."""
        d = self._coerce(d)
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        dm, dc = d.lm(), d.lc()
        rem, quo = self, {}
        while rem:
            m, c = rem.lm(), rem.lc()
            if any(a < b for a, b in zip(m, dm)):
                raise ValueError("inexact polynomial division")
            q = tuple(a - b for a, b in zip(m, dm))
            quo[q] = c / dc
            rem = rem - Polynomial(self.ctx, {q: c / dc}, _trusted=True) * d
        return Polynomial(self.ctx, quo, _trusted=True)

    # -- calculus and evaluation ---------------------------------------------
    def diff(self, var: str) -> "Polynomial":
        i = self.ctx.index(var)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Polynomial(self.ctx, out, _trusted=True)

    def substitute(self, bindings: Mapping[str, Union["Polynomial", Scalar]]) -> "Polynomial":
        """Image under x_i -> bindings[x_i]; unbound variables are kept."""
        vals = {}
        for name, v in bindings.items():
            idx = self.ctx.index(name)
            vals[idx] = self._coerce(v)
        result = self.ctx.zero()
        powers: dict[tuple[int, int], Polynomial] = {}
        for m, c in self._terms.items():
            keep = tuple(0 if i in vals else e for i, e in enumerate(m))
            term = Polynomial(self.ctx, {keep: c}, _trusted=True)
            for i, e in enumerate(m):
                if e and i in vals:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = vals[i] ** e
                    term = term * powers[key]
            result = result + term
        return result

    def evaluate(self, point: Sequence[Scalar]) -> mpq:
        """Value at a full point (one rational per variable)."""
        if len(point) != self.ctx.arity:
            raise ValueError(f"point has {len(point)} coordinates, ring has {self.ctx.arity}")
        pt = [QQ(v) for v in point]
        total = mpq(0)
        for m, c in self._terms.items():
            t = c
            for v, e in zip(pt, m):
                if e:
                    t *= v ** e
            total += t
        return total

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.ctx, {m: c for m, c in self._terms.items() if sum(m) == d}, _trusted=True)

    def leading_form(self) -> "Polynomial":
        return self.homogeneous_part(self.degree())

    def to_ctx(self, ctx: VariableContext) -> "Polynomial":
        """Re-express in ``ctx``; every variable actually used must exist there."""
        if ctx is self.ctx or (ctx.names == self.ctx.names):
            return Polynomial(ctx, self._terms, _trusted=True)
        idx = [ctx.index(nm) if nm in ctx._index else None for nm in self.ctx.names]
        out = {}
        for m, c in self._terms.items():
            mm = [0] * ctx.arity
            for i, e in enumerate(m):
                if e:
                    if idx[i] is None:
                        raise ContextMismatchError(f"variable {self.ctx.names[i]} missing in target ring")
                    mm[idx[i]] = e
            out[tuple(mm)] = c
        return Polynomial(ctx, out, _trusted=True)

    def __str__(self):
        from .parsing import render_polynomial
        return render_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def substitute(p: Polynomial, bindings) -> Polynomial:
    return p.substitute(bindings)


def leading_form(p: Polynomial) -> Polynomial:
    if p.is_zero():
        raise ValueError("leading form of the zero polynomial is undefined")
    return p.leading_form()


def homogenize(p: Polynomial, w: str, degree: int | None = None) -> Polynomial:
    """Homogenize with a fresh variable ``w`` appended to the ring.

    ``degree`` defaults to deg(p); a larger value multiplies by a power of w.
    """
    if w in p.ctx.names:
        raise ValueError(f"variable {w!r} already present")
    ctx = p.ctx.extend(w)
    if p.is_zero():
        return ctx.zero()
    d = p.degree() if degree is None else degree
    if d < p.degree():
        raise ValueError("homogenizing degree below the polynomial degree")
    return Polynomial(ctx, {m + (d - sum(m),): c for m, c in p._terms.items()}, _trusted=True)


def dehomogenize(p: Polynomial, w: str) -> Polynomial:
    """Set ``w = 1`` and drop it from the ring."""
    i = p.ctx.index(w)
    ctx = p.ctx.drop([w])
    out: dict[Monomial, mpq] = {}
    for m, c in p._terms.items():
        mm = m[:i] + m[i + 1:]
        v = out.get(mm, 0) + c
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return Polynomial(ctx, out, _trusted=True)


# ---------------------------------------------------------------------------
# maps and matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyMap:
    """F = (F_1, ..., F_m) from the source ring to named target coordinates."""

    source: VariableContext
    targets: tuple[str, ...]
    components: tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.targets) != len(self.components):
            raise ValueError("need one target name per component")
        for c in self.components:
            if not c.ctx.same_vars(self.source):
                raise ContextMismatchError("component outside the source ring")
        if set(self.targets) & set(self.source.names):
            raise ValueError("target names must differ from source names")
        VariableContext(self.targets)  # validates names

    @classmethod
    def from_strings(cls, source_vars: Sequence[str], components: Sequence[str],
                     targets: Sequence[str] | None = None, name: str = "",
                     order: MonomialOrder = GREVLEX) -> "PolyMap":
        ctx = VariableContext(tuple(source_vars), order)
        comps = tuple(ctx(c) for c in components)
        if targets is None:
            targets = default_targets(len(comps), ctx.names)
        return cls(ctx, tuple(targets), comps, name)

    @property
    def n(self) -> int:
        return self.source.arity

    def is_square(self) -> bool:
        return len(self.components) == self.source.arity

    def require_square(self):
        if not self.is_square():
            raise ValueError(f"map has {len(self.components)} components in "
                             f"{self.source.arity} variables; a square map is required")

    @cached_property
    def target_ctx(self) -> VariableContext:
        order = self.source.order if self.source.order.kind != "block" else GREVLEX
        return VariableContext(self.targets, order)

    @cached_property
    def graph_ctx(self) -> VariableContext:
        return self.source.extend(*self.targets)

    def graph_equations(self) -> list[Polynomial]:
        """y_i - F_i(x) in the ring of source and target variables."""
        g = self.graph_ctx
        return [g.var(t) - f.to_ctx(g) for t, f in zip(self.targets, self.components)]

    def evaluate(self, point: Sequence[Scalar]) -> tuple[mpq, ...]:
        return tuple(f.evaluate(point) for f in self.components)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self o inner; inner's targets are matched positionally to self's sources."""
        if len(inner.components) != self.source.arity:
            raise ValueError("arity mismatch in composition")
        binds = {v: c for v, c in zip(self.source.names, inner.components)}
        comps = []
        for f in self.components:
            # substitute through a shared ring holding both variable sets
            big = VariableContext(tuple(dict.fromkeys(self.source.names + inner.source.names)))
            fb = f.to_ctx(big).substitute({k: v.to_ctx(big) for k, v in binds.items()})
            comps.append(fb.to_ctx(inner.source))
        return PolyMap(inner.source, self.targets, tuple(comps))

    def __hash__(self):
        return hash((self.source.names, self.targets, self.components))

    def __eq__(self, other):
        return (isinstance(other, PolyMap) and self.source.names == other.source.names
                and self.targets == other.targets and self.components == other.components)


def default_targets(n: int, avoid: Sequence[str] = ()) -> tuple[str, ...]:
    stem = "a"
    while any(f"{stem}{i + 1}" in avoid for i in range(n)):
        stem += "a"
    return tuple(f"{stem}{i + 1}" for i in range(n))


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match the shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]), tuple(e for r in rows for e in r))

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Polynomial]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list[Polynomial]]:
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols))

    def evaluate(self, point: Sequence[Scalar]) -> list[list[mpq]]:
        return [[e.evaluate(point) for e in self.row(i)] for i in range(self.rows)]

    def rank_at(self, point: Sequence[Scalar]) -> int:
        return rational_rank(self.evaluate(point))

    def stack(self, other: "PolyMatrix") -> "PolyMatrix":
        if other.cols != self.cols:
            raise ValueError("column mismatch")
        return PolyMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)


def jacobian(F: PolyMap) -> PolyMatrix:
    return jacobian_of(F.components, F.source)


def jacobian_of(polys: Sequence[Polynomial], ctx: VariableContext) -> PolyMatrix:
    return PolyMatrix(len(polys), ctx.arity, tuple(p.diff(v) for p in polys for v in ctx.names))


def determinant(M: PolyMatrix) -> Polynomial:
    """Fraction-free (Bareiss) determinant over the polynomial ring."""
    if M.rows != M.cols:
        raise ValueError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    a = M.to_rows()
    ctx = a[0][0].ctx
    sign = 1
    prev = ctx.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return ctx.zero()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev) if not prev == 1 else num
            a[i][k] = ctx.zero()
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def cofactor_determinant(M: PolyMatrix, row: int = 0) -> Polynomial:
    """Laplace expansion along ``row``; slow, used as an independent check."""
    if M.rows != M.cols:
        raise ValueError("non-square matrix")
    n = M.rows
    if n == 1:
        return M[0, 0]
    total = M[0, 0].ctx.zero()
    for j in range(n):
        e = M[row, j]
        if e.is_zero():
            continue
        minor = M.submatrix([i for i in range(n) if i != row], [c for c in range(n) if c != j])
        term = e * cofactor_determinant(minor)
        total = total + term if (row + j) % 2 == 0 else total - term
    return total


def minors(M: PolyMatrix, k: int) -> list[Polynomial]:
    """All k x k minors, in row-major combination order (zeros included)."""
    if not 1 <= k <= min(M.rows, M.cols):
        raise ValueError(f"minor size {k} out of range for a {M.rows}x{M.cols} matrix")
    return [determinant(M.submatrix(r, c))
            for r in combinations(range(M.rows), k)
            for c in combinations(range(M.cols), k)]


def minors_ideal(M: PolyMatrix, k: int) -> list[Polynomial]:
    """Distinct non-zero k x k minors, normalised to be monic (ideal generators)."""
    seen, out = set(), []
    for m in minors(M, k):
        if m.is_zero():
            continue
        m = m.monic()
        if m not in seen:
            seen.add(m)
            out.append(m)
    return out


def generic_rank(M: PolyMatrix) -> int:
    """Largest k such that some k x k minor is a non-zero polynomial."""
    best = 0
    for k in range(1, min(M.rows, M.cols) + 1):
        if any(not m.is_zero() for m in minors(M, k)):
            best = k
        else:
            break
    return best


def rational_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    a = [[QQ(v) for v in r] for r in rows]
    if not a:
        return 0
    rank, ncols = 0, len(a[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][col]:
                f = a[i][col] / a[rank][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# bridges to sympy for factorisation and rational roots
# ---------------------------------------------------------------------------

def _to_sympy(p: Polynomial):
    import sympy
    gens = sympy.symbols(p.ctx.names) if p.ctx.arity > 1 else (sympy.Symbol(p.ctx.names[0]),)
    data = {m: sympy.Rational(int(c.numerator), int(c.denominator)) for m, c in p._terms.items()}
    return sympy.Poly.from_dict(data, *gens, domain=sympy.QQ)


def _from_sympy(sp_poly, ctx: VariableContext) -> Polynomial:
    out = {}
    for m, c in sp_poly.terms():
        out[tuple(m)] = mpq(int(c.p), int(c.q))
    return Polynomial(ctx, out)


def factor_squarefree(p: Polynomial) -> list[Polynomial]:
    """Distinct irreducible factors over QQ (monic, multiplicities dropped)."""
    if p.is_zero() or p.is_constant():
        return []
    _, facs = _to_sympy(p).factor_list()
    out = [_from_sympy(f, p.ctx).monic() for f, _ in facs]
    out = [f for f in out if not f.is_constant()]
    return sorted(set(out), key=str)


def squarefree_part(p: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors, made monic."""
    if p.is_zero() or p.is_constant():
        return p
    return _from_sympy(_to_sympy(p).sqf_part(), p.ctx).monic()


def rational_roots(p: Polynomial) -> list[mpq]:
    """Rational roots of a univariate polynomial (in any single variable)."""
    used = p.variables()
    if len(used) > 1:
        raise ValueError("rational_roots needs a univariate polynomial")
    if not used:
        return []
    (v,) = used
    i = p.ctx.index(v)
    coeffs: dict[int, mpq] = {}
    for m, c in p._terms.items():
        coeffs[m[i]] = c
    import sympy
    x = sympy.Symbol("x")
    expr = sympy.Poly.from_dict({(e,): sympy.Rational(int(c.numerator), int(c.denominator))
                                 for e, c in coeffs.items()}, x, domain=sympy.QQ)
    roots = expr.ground_roots()
    return sorted(mpq(int(r.p), int(r.q)) for r in roots)


def lcm_denominators(values: Iterable[mpq]) -> int:
    from math import lcm
    return reduce(lcm, (int(v.denominator) for v in values), 1)
