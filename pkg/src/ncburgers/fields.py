"""Non-commutative field expressions.

A field expression is a rational-linear combination of words, where a word
is an ordered tuple of atoms (jets of a base symbol, test fields, formal
antiderivatives, or the formal inverse of ``u``).  Multiplication is word
concatenation and is not commutative.  All coefficients are exact
:class:`fractions.Fraction` values; there is no floating point anywhere in
the symbolic layer.

Derivations come in three flavours, selected by :class:`DerivationTag`:

* ``PLAIN``   -- the total x-derivative ``D``,
* ``MIRROR``  -- ``D - [r, .]``, written ``ID``,
* ``DIRECT``  -- ``D + [s, .]``, written ``DD``.

The commutator field of a tag (``r`` for mirror, ``s`` for direct) can be
overridden through a :class:`Context`; the Cole-Hopf checks use that to work
with ``r`` replaced by ``u_x u^-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

Rat = Union[int, Fraction]

JET_SYMBOLS = ("r", "s", "u", "v")
TEST_NAMES = ("V", "W", "sigma")


class DerivationTag(enum.Enum):
    PLAIN = "plain"
    MIRROR = "mirror"
    DIRECT = "direct"

    def __repr__(self) -> str:  # keep reprs short in defect logs
        return self.name


# der(tag, f) = d_total(f) - sign * [field, f]
_TAG_SIGN = {
    DerivationTag.PLAIN: 0,
    DerivationTag.MIRROR: 1,
    DerivationTag.DIRECT: -1,
}

# base symbol conventionally attached to each tag
TAG_BASE = {
    DerivationTag.MIRROR: "r",
    DerivationTag.DIRECT: "s",
}


@dataclass(frozen=True)
class Jet:
    """A jet variable: ``symbol`` differentiated ``order`` times in x."""

    symbol: str
    order: int = 0


@dataclass(frozen=True)
class TestField:
    """An arbitrary direction/probe field (V, W or sigma) and its jets."""

    name: str
    order: int = 0


@dataclass(frozen=True)
class InverseSymbol:
    """Formal inverse ``u^-1``; only meaningful in a Cole-Hopf context."""

    base: str = "u"


@dataclass(frozen=True)
class Integral:
    """Formal antiderivative atom: ``DerInv(tag)`` applied to a body.

    The body is a full field expression, stored exactly as the canonical
    splitting pass produced it (see ``reduction.derinv``); bodies are in
    normal form and are never an exact derivative of anything the splitter
    can recognize.
    """

    tag: DerivationTag
    body: "FieldExpr"


Atom = Union[Jet, TestField, InverseSymbol, Integral]
Word = Tuple[Atom, ...]


def _atom_key(a: Atom):
    if isinstance(a, Jet):
        return (0, a.symbol, a.order)
    if isinstance(a, TestField):
        return (1, a.name, a.order)
    if isinstance(a, InverseSymbol):
        return (2, a.base, 0)
    # Integral: order by tag then body terms, recursively
    return (
        3,
        a.tag.value,
        tuple(sorted((word_key(w), c) for w, c in a.body.terms.items())),
    )


def word_key(w: Word):
    """Total order on words: length first, then atom-wise keys."""
    return (len(w), tuple(_atom_key(a) for a in w))


def _print_atom_key(a: Atom):
    # like _atom_key but with jets sorted highest-derivative first,
    # which matches the conventional way hierarchy members are written
    if isinstance(a, Jet):
        return (0, a.symbol, -a.order)
    if isinstance(a, TestField):
        return (1, a.name, -a.order)
    if isinstance(a, InverseSymbol):
        return (2, a.base, 0)
    return (
        3,
        a.tag.value,
        tuple(sorted((print_word_key(w), c) for w, c in a.body.terms.items())),
    )


def print_word_key(w: Word):
    return (len(w), tuple(_print_atom_key(a) for a in w))


def _cancel_uinv(word: Word) -> Word:
    """Apply u u^-1 -> 1 and u^-1 u -> 1 until no adjacent pair remains."""
    if not any(isinstance(a, InverseSymbol) for a in word):
        return word
    factors = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(factors) - 1):
            a, b = factors[i], factors[i + 1]
            if (
                isinstance(a, Jet)
                and a.order == 0
                and isinstance(b, InverseSymbol)
                and b.base == a.symbol
            ) or (
                isinstance(a, InverseSymbol)
                and isinstance(b, Jet)
                and b.order == 0
                and b.symbol == a.base
            ):
                del factors[i : i + 2]
                changed = True
                break
    return tuple(factors)


class FieldExpr:
    """Immutable linear combination of words with Fraction coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Word, Rat]] = None):
        acc: dict = {}
        if terms:
            for word, coeff in terms.items():
                c = Fraction(coeff)
                if c == 0:
                    continue
                w = _cancel_uinv(tuple(word))
                acc[w] = acc.get(w, Fraction(0)) + c
                if acc[w] == 0:
                    del acc[w]
        object.__setattr__(self, "terms", acc)
        object.__setattr__(self, "_hash", None)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def _raw(acc: dict) -> "FieldExpr":
        """Trusted constructor: canonical words, Fraction coefficients, no zeros."""
        self = object.__new__(FieldExpr)
        object.__setattr__(self, "terms", acc)
        object.__setattr__(self, "_hash", None)
        return self

    @staticmethod
    def zero() -> "FieldExpr":
        return FieldExpr()

    @staticmethod
    def unit() -> "FieldExpr":
        return FieldExpr({(): 1})

    @staticmethod
    def scalar(c: Rat) -> "FieldExpr":
        return FieldExpr({(): c})

    @staticmethod
    def from_word(word: Iterable[Atom], coeff: Rat = 1) -> "FieldExpr":
        return FieldExpr({tuple(word): coeff})

    @staticmethod
    def from_atom(atom: Atom, coeff: Rat = 1) -> "FieldExpr":
        return FieldExpr({(atom,): coeff})

    # -- linear / ring structure -------------------------------------------

    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        if not other.terms:
            return self
        acc = dict(self.terms)
        for w, c in other.terms.items():
            cur = acc.get(w)
            new = c if cur is None else cur + c
            if new == 0:
                acc.pop(w, None)
            else:
                acc[w] = new
        return FieldExpr._raw(acc)

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        if not other.terms:
            return self
        acc = dict(self.terms)
        for w, c in other.terms.items():
            cur = acc.get(w)
            new = -c if cur is None else cur - c
            if new == 0:
                acc.pop(w, None)
            else:
                acc[w] = new
        return FieldExpr._raw(acc)

    def __neg__(self) -> "FieldExpr":
        return FieldExpr._raw({w: -c for w, c in self.terms.items()})

    def scale(self, c: Rat) -> "FieldExpr":
        c = Fraction(c)
        if c == 0:
            return FieldExpr()
        return FieldExpr._raw({w: c * k for w, k in self.terms.items()})

    def __mul__(self, other: "FieldExpr") -> "FieldExpr":
        acc: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = _cancel_uinv(w1 + w2)
                coeff = c1 * c2
                cur = acc.get(w)
                new = coeff if cur is None else cur + coeff
                if new == 0:
                    acc.pop(w, None)
                else:
                    acc[w] = new
        return FieldExpr._raw(acc)

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Word, Fraction]]:
        return iter(self.terms.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldExpr) and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        from .lang import print_field

        return print_field(self)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: print_word_key(kv[0]))

    def coefficient(self, word: Word) -> Fraction:
        return self.terms.get(tuple(word), Fraction(0))

    def atoms(self) -> Iterator[Atom]:
        for w in self.terms:
            yield from w

    def contains_integral(self) -> bool:
        return any(isinstance(a, Integral) for a in self.atoms())

    def jet_symbols(self) -> set:
        out = set()

        def walk(atom):
            if isinstance(atom, Jet):
                out.add(atom.symbol)
            elif isinstance(atom, Integral):
                for w in atom.body.terms:
                    for b in w:
                        walk(b)

        for a in self.atoms():
            walk(a)
        return out

    def test_names(self) -> set:
        out = set()

        def walk(atom):
            if isinstance(atom, TestField):
                out.add(atom.name)
            elif isinstance(atom, Integral):
                for w in atom.body.terms:
                    for b in w:
                        walk(b)

        for a in self.atoms():
            walk(a)
        return out


ZERO = FieldExpr.zero()
ONE = FieldExpr.unit()


def jet(symbol: str, order: int = 0) -> FieldExpr:
    return FieldExpr.from_atom(Jet(symbol, order))


def test(name: str, order: int = 0) -> FieldExpr:
    return FieldExpr.from_atom(TestField(name, order))


def uinv(base: str = "u") -> FieldExpr:
    return FieldExpr.from_atom(InverseSymbol(base))


def combine(a: FieldExpr, b: FieldExpr, c1: Rat = 1, c2: Rat = 1) -> FieldExpr:
    """c1*a + c2*b with zero terms dropped."""
    return a.scale(c1) + b.scale(c2)


def commutator(a: FieldExpr, b: FieldExpr) -> FieldExpr:
    return a * b - b * a


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class Context:
    """Evaluation context: commutator field per tag plus rewrite bounds.

    ``integral_depth`` bounds the nesting of antiderivative atoms a single
    reduction is allowed to create; exceeding it raises
    :class:`NestingLimitExceeded` so a verification can report itself as
    inconclusive instead of looping.
    """

    tag_fields: Mapping[DerivationTag, FieldExpr]
    integral_depth: int = 4
    reduce_rounds: int = 200000
    reduce_passes: int = 80

    def tag_field(self, tag: DerivationTag) -> FieldExpr:
        return self.tag_fields.get(tag, ZERO)

    def with_depth(self, depth: int) -> "Context":
        return Context(self.tag_fields, depth, self.reduce_rounds, self.reduce_passes)


def default_context(integral_depth: int = 4) -> Context:
    return Context(
        {
            DerivationTag.MIRROR: jet("r"),
            DerivationTag.DIRECT: jet("s"),
        },
        integral_depth=integral_depth,
    )


DEFAULT_CONTEXT = default_context()


def cole_hopf_context(tag: DerivationTag, integral_depth: int = 4) -> Context:
    """Context where the tag's commutator field is the Cole-Hopf image.

    Mirror: r = u_x u^-1.  Direct: s = u^-1 u_x.
    """
    if tag == DerivationTag.MIRROR:
        field = FieldExpr.from_word((Jet("u", 1), InverseSymbol("u")))
    elif tag == DerivationTag.DIRECT:
        field = FieldExpr.from_word((InverseSymbol("u"), Jet("u", 1)))
    else:
        raise ValueError("Cole-Hopf context needs the mirror or direct tag")
    return Context({tag: field}, integral_depth=integral_depth)


class NestingLimitExceeded(Exception):
    """Raised when a rewrite would nest antiderivatives past the bound."""


# ---------------------------------------------------------------------------
# derivations


def _d_atom(atom: Atom, ctx: Context) -> FieldExpr:
    if isinstance(atom, Jet):
        return FieldExpr.from_atom(Jet(atom.symbol, atom.order + 1))
    if isinstance(atom, TestField):
        return FieldExpr.from_atom(TestField(atom.name, atom.order + 1))
    if isinstance(atom, InverseSymbol):
        # d(u^-1) = -u^-1 u_x u^-1
        return FieldExpr.from_word(
            (InverseSymbol(atom.base), Jet(atom.base, 1), InverseSymbol(atom.base)),
            -1,
        )
    # antiderivative: der(tag, I) = body forces
    # d(I) = body + sign * [field, I]
    sign = _TAG_SIGN[atom.tag]
    if sign == 0:
        return atom.body
    field = ctx.tag_field(atom.tag)
    i_expr = FieldExpr.from_atom(atom)
    return atom.body + commutator(field, i_expr).scale(sign)


def d_total(f: FieldExpr, ctx: Context = DEFAULT_CONTEXT) -> FieldExpr:
    """Total x-derivative: Leibniz over words, jet orders shifted up."""
    acc: dict = {}
    for word, coeff in f.terms.items():
        for i, atom in enumerate(word):
            pre, post = word[:i], word[i + 1 :]
            for dw, dc in _d_atom(atom, ctx).terms.items():
                w = _cancel_uinv(pre + dw + post)
                c = coeff * dc
                cur = acc.get(w)
                new = c if cur is None else cur + c
                if new == 0:
                    acc.pop(w, None)
                else:
                    acc[w] = new
    return FieldExpr._raw(acc)


def der(tag: DerivationTag, f: FieldExpr, ctx: Context = DEFAULT_CONTEXT) -> FieldExpr:
    """The tagged derivation: D, D - [r, .] or D + [s, .]."""
    sign = _TAG_SIGN[tag]
    df = d_total(f, ctx)
    if sign == 0:
        return df
    return df - commutator(ctx.tag_field(tag), f).scale(sign)


def normal_field(f: FieldExpr, ctx: Context = DEFAULT_CONTEXT) -> FieldExpr:
    """Canonical form of a field expression.

    Construction already keeps expressions flattened and collected, so this
    re-normalizes antiderivative bodies (unwrapping any body that has become
    an exact derivative) and re-cancels u u^-1 pairs.  Idempotent.
    """
    from .reduction import derinv

    acc = FieldExpr.zero()
    for word, coeff in f.terms.items():
        factors = FieldExpr.unit()
        for atom in word:
            if isinstance(atom, Integral):
                factors = factors * derinv(atom.tag, normal_field(atom.body, ctx), ctx)
            else:
                factors = factors * FieldExpr.from_atom(atom)
        acc = acc + factors.scale(coeff)
    return acc


# ---------------------------------------------------------------------------
# substitution


def subst_jets(
    f: FieldExpr, symbol: str, replacement: FieldExpr, ctx: Context = DEFAULT_CONTEXT
) -> FieldExpr:
    """Replace every jet of ``symbol`` by the matching derivative of ``replacement``."""
    cache = {0: replacement}

    def rep(order: int) -> FieldExpr:
        while order not in cache:
            top = max(cache)
            cache[top + 1] = d_total(cache[top], ctx)
        return cache[order]

    def sub_atom(atom: Atom) -> FieldExpr:
        if isinstance(atom, Jet) and atom.symbol == symbol:
            return rep(atom.order)
        if isinstance(atom, Integral):
            body = sub_expr(atom.body)
            if body == atom.body:
                return FieldExpr.from_atom(atom)
            from .reduction import derinv

            return derinv(atom.tag, body, ctx)
        return FieldExpr.from_atom(atom)

    def sub_expr(e: FieldExpr) -> FieldExpr:
        acc = FieldExpr.zero()
        for word, coeff in e.terms.items():
            out = FieldExpr.unit()
            for atom in word:
                out = out * sub_atom(atom)
            acc = acc + out.scale(coeff)
        return acc

    return sub_expr(f)


def subst_test(
    f: FieldExpr, name: str, replacement: FieldExpr, ctx: Context = DEFAULT_CONTEXT
) -> FieldExpr:
    """Replace every jet of test field ``name`` by derivatives of ``replacement``."""
    cache = {0: replacement}

    def rep(order: int) -> FieldExpr:
        while order not in cache:
            top = max(cache)
            cache[top + 1] = d_total(cache[top], ctx)
        return cache[order]

    def sub_atom(atom: Atom) -> FieldExpr:
        if isinstance(atom, TestField) and atom.name == name:
            return rep(atom.order)
        if isinstance(atom, Integral):
            body = sub_expr(atom.body)
            if body == atom.body:
                return FieldExpr.from_atom(atom)
            from .reduction import derinv

            return derinv(atom.tag, body, ctx)
        return FieldExpr.from_atom(atom)

    def sub_expr(e: FieldExpr) -> FieldExpr:
        acc = FieldExpr.zero()
        for word, coeff in e.terms.items():
            out = FieldExpr.unit()
            for atom in word:
                out = out * sub_atom(atom)
            acc = acc + out.scale(coeff)
        return acc

    return sub_expr(f)


def rename_tests(f: FieldExpr, mapping: Mapping[str, str]) -> FieldExpr:
    """Simultaneously rename test fields, e.g. swap V and W."""

    def ren_atom(atom: Atom) -> Atom:
        if isinstance(atom, TestField) and atom.name in mapping:
            return TestField(mapping[atom.name], atom.order)
        if isinstance(atom, Integral):
            return Integral(atom.tag, ren_expr(atom.body))
        return atom

    def ren_expr(e: FieldExpr) -> FieldExpr:
        return FieldExpr(
            {tuple(ren_atom(a) for a in w): c for w, c in e.terms.items()}
        )

    return ren_expr(f)


# ---------------------------------------------------------------------------
# grading


def atom_weight(atom: Atom) -> int:
    """Scaling weight: a bare symbol weighs 1, each x-derivative adds 1."""
    if isinstance(atom, Jet):
        return atom.order + 1
    if isinstance(atom, TestField):
        return atom.order + 1
    if isinstance(atom, InverseSymbol):
        return -1
    return max((word_weight(w) for w in atom.body.terms), default=1) - 1


def word_weight(word: Word) -> int:
    return sum(atom_weight(a) for a in word)


def max_jet_order(f: FieldExpr) -> int:
    top = 0

    def walk(atom):
        nonlocal top
        if isinstance(atom, (Jet, TestField)):
            top = max(top, atom.order)
        elif isinstance(atom, Integral):
            for w in atom.body.terms:
                for b in w:
                    walk(b)

    for a in f.atoms():
        walk(a)
    return top


def integral_nesting(atom_or_word) -> int:
    """Maximum nesting depth of antiderivative atoms."""
    if isinstance(atom_or_word, tuple):
        return max((integral_nesting(a) for a in atom_or_word), default=0)
    if isinstance(atom_or_word, Integral):
        return 1 + expr_nesting(atom_or_word.body)
    return 0


def expr_nesting(f: FieldExpr) -> int:
    return max((integral_nesting(w) for w in f.terms), default=0)
