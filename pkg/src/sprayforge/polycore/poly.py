"""Sparse multivariate polynomials over Q and monomial orders.

A polynomial in ``nvars`` variables is a map from exponent tuples to nonzero
``Fraction`` coefficients.  The zero polynomial has an empty term map.
Instances are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


def _grevlex_key(e: Exponent):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order; ``key(e)`` is larger for larger monomials.

    ``kind`` is one of ``grevlex``, ``grlex``, ``lex`` or ``block``.  A block
    order compares the variables in ``elim`` first (grevlex on that block) and
    breaks ties by grevlex on the remaining variables, which makes it an
    elimination order for ``elim``.
    """

    kind: str = "grevlex"
    elim: tuple[int, ...] = ()
    key: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind == "grevlex":
            fn = _grevlex_key
        elif self.kind == "grlex":
            fn = lambda e: (sum(e), e)  # noqa: E731
        elif self.kind == "lex":
            fn = lambda e: e  # noqa: E731
        elif self.kind == "block":
            elim = self.elim
            elim_set = set(elim)

            def fn(e, elim=elim, elim_set=elim_set):
                head = tuple(e[i] for i in elim)
                tail = tuple(x for i, x in enumerate(e) if i not in elim_set)
                return (_grevlex_key(head), _grevlex_key(tail))
        else:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "key", fn)

    @property
    def tag(self) -> str:
        if self.kind == "block":
            return "block:" + ",".join(str(i) for i in self.elim)
        return self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(elim: Iterable[int]) -> MonomialOrder:
    """Elimination order with the variables ``elim`` greater than all others."""
    return MonomialOrder("block", tuple(sorted(set(elim))))


def var_names(n: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


def chart_names(n: int, r: int) -> list[str]:
    """Variable names of a blow-up chart ring: x1..xn, l1..l{r-1}."""
    return var_names(n) + var_names(max(r - 1, 0), "l")


def spray_names(n: int, r: int) -> list[str]:
    """Names for (t, chart variables)."""
    return ["t"] + chart_names(n, r)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"coefficient must be int, str or Fraction, got {type(c).__name__}")


class MPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash", "_lead")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
                c = _as_fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None
        self._lead = {}

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> MPoly:
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        obj._lead = {}
        return obj

    # construction --------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> MPoly:
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, c, nvars: int) -> MPoly:
        c = _as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, i: int, nvars: int) -> MPoly:
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, e: Exponent, c=1) -> MPoly:
        return cls(len(e), {tuple(e): c})

    @classmethod
    def gens(cls, nvars: int) -> list[MPoly]:
        return [cls.var(i, nvars) for i in range(nvars)]

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> MPoly:
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        if const:
            terms[(0,) * n] = const
        return cls(n, terms)

    # basic queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # leading data under an order ----------------------------------------
    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Exponent:
        lm = self._lead.get(order.tag)
        if lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            lm = max(self.terms, key=order.key)
            self._lead[order.tag] = lm
        return lm

    def leading_coeff(self, order: MonomialOrder = GREVLEX) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder = GREVLEX) -> MPoly:
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coeff(order))

    def primitive(self, order: MonomialOrder = GREVLEX) -> MPoly:
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c * den))
        s = Fraction(den, g)
        if self.leading_coeff(order) < 0:
            s = -s
        return self.scale(s)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> MPoly:
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"ring mismatch: {self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(other, self.nvars)
        return NotImplemented

    def __add__(self, other) -> MPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) - c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly._raw(self.nvars, out)

    def __rsub__(self, other) -> MPoly:
        return (-self) + other

    def scale(self, c) -> MPoly:
        c = _as_fraction(c)
        if not c:
            return MPoly.zero(self.nvars)
        return MPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, e: Exponent, c) -> MPoly:
        """Multiply by the single term c * x^e."""
        if not c:
            return MPoly.zero(self.nvars)
        return MPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(m, e)): v * c for m, v in self.terms.items()},
        )

    def __mul__(self, other) -> MPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) < len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict[Exponent, Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(e, 0) + ca * cb
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return MPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MPoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MPoly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # calculus and substitution ------------------------------------------
    def diff(self, i: int) -> MPoly:
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return MPoly._raw(self.nvars, out)

    def evaluate(self, point: Sequence):
        """Evaluate at ``point``; entries may be any ring elements closed under +, * with Fraction."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = Fraction(0)
        powers: dict[tuple[int, int], object] = {}
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    p = powers.get((i, k))
                    if p is None:
                        p = point[i] ** k
                        powers[(i, k)] = p
                    term = term * p
            total = total + term
        return total

    __call__ = evaluate

    def subs(self, images: Sequence[MPoly], nvars: int | None = None) -> MPoly:
        """Compose: replace variable i by ``images[i]`` (all in a common ring)."""
        if len(images) != self.nvars:
            raise ValueError(f"need {self.nvars} images, got {len(images)}")
        if nvars is None:
            if not images:
                raise ValueError("target ring size required for a 0-variable polynomial")
            nvars = images[0].nvars
        result = MPoly.zero(nvars)
        powers: dict[tuple[int, int], MPoly] = {}
        for e, c in self.terms.items():
            term = MPoly.const(c, nvars)
            for i, k in enumerate(e):
                if k:
                    p = powers.get((i, k))
                    if p is None:
                        p = images[i] ** k
                        powers[(i, k)] = p
                    term = term * p
            result = result + term
        return result

    def partial_subs(self, values: Mapping[int, object]) -> MPoly:
        """Substitute constants for some variables, keeping the ring size."""
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            v = c
            ne = list(e)
            for i, x in values.items():
                if e[i]:
                    v = v * Fraction(x) ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            s = out.get(ne, 0) + v
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
        return MPoly._raw(self.nvars, out)

    def remap(self, nvars: int, index_map: Sequence[int]) -> MPoly:
        """Move variable i to position ``index_map[i]`` in a ring of ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    ne[index_map[i]] += k
            out[tuple(ne)] = c
        return MPoly._raw(nvars, out)

    def embed(self, nvars: int, offset: int = 0) -> MPoly:
        """Place this ring's variables at positions offset..offset+self.nvars-1."""
        return self.remap(nvars, [offset + i for i in range(self.nvars)])

    def restrict(self, keep: Sequence[int]) -> MPoly:
        """Drop to the ring on ``keep``; the polynomial must not involve other variables."""
        pos = {v: k for k, v in enumerate(keep)}
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(keep)
            for i, k in enumerate(e):
                if k:
                    if i not in pos:
                        raise ValueError(f"polynomial involves variable {i} outside {list(keep)}")
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return MPoly._raw(len(keep), out)

    def coefficients_in(self, i: int) -> dict[int, MPoly]:
        """Write self = sum_k c_k * x_i^k; returns {k: c_k} with c_k free of x_i."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = list(e)
            k = ne[i]
            ne[i] = 0
            out.setdefault(k, {})[tuple(ne)] = c
        return {k: MPoly._raw(self.nvars, t) for k, t in out.items()}

    def homogeneous_part(self, d: int) -> MPoly:
        return MPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # printing ------------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        """Render in the package's polynomial grammar (grevlex-descending terms)."""
        if names is None:
            names = var_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=GREVLEX.key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono and a == 1:
                body = mono
            elif mono:
                body = f"{a}*{mono}"
            else:
                body = str(a)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MPoly({self.nvars}, {self.to_str()!r})"


def jacobian(polys: Sequence[MPoly], nvars: int | None = None) -> list[list[MPoly]]:
    """Symbolic Jacobian: rows are polynomials, columns are variables."""
    if nvars is None:
        nvars = polys[0].nvars if polys else 0
    return [[p.diff(j) for j in range(nvars)] for p in polys]


def jacobian_at(polys: Sequence[MPoly], point: Sequence) -> list[list[Fraction]]:
    """Exact Jacobian matrix of ``polys`` at ``point``."""
    pt = [Fraction(x) for x in point]
    for p in polys:
        if p.nvars != len(pt):
            raise ValueError(f"map entry has {p.nvars} variables but point has {len(pt)}")
    return [[p.diff(j).evaluate(pt) for j in range(len(pt))] for p in polys]


def compose(outer: Sequence[MPoly], inner: Sequence[MPoly]) -> list[MPoly]:
    return [p.subs(inner, inner[0].nvars if inner else 0) for p in outer]


def to_point(coords: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coords)
