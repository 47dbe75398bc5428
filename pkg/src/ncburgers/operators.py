"""Operator expressions: compositions of D, tagged derivations and their
inverses, and multiplication operators, with rational coefficients.

An operator word acts on field expressions from the right end inward, so
``(D, L(r))`` means "multiply by r on the left, then differentiate".  The
canonical form expands commutator and tagged-derivation atoms over the
D / DerInv / LeftMul / RightMul alphabet, merges adjacent multiplications,
and pushes D to the right past multiplication operators; equality of
operators is decided by probing with a fresh test field (``op_probe_equal``),
which is the ground truth everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .fields import (
    Context,
    DEFAULT_CONTEXT,
    DerivationTag,
    FieldExpr,
    Rat,
    TestField,
    Word,
    commutator,
    d_total,
    der,
    word_key,
)
from .reduction import deep_reduce, derinv


@dataclass(frozen=True)
class OpD:
    """Total x-derivative."""


@dataclass(frozen=True)
class OpDer:
    """Tagged derivation: D (plain), D - [r, .] (mirror), D + [s, .] (direct)."""

    tag: DerivationTag


@dataclass(frozen=True)
class OpDerInv:
    """Formal inverse of the tagged derivation."""

    tag: DerivationTag


@dataclass(frozen=True)
class OpLeft:
    """Left multiplication by a single word (scalars live in coefficients)."""

    word: Word


@dataclass(frozen=True)
class OpRight:
    word: Word


@dataclass(frozen=True)
class OpComm:
    """Commutator with a word; expands to OpLeft - OpRight."""

    word: Word


OpAtom = Union[OpD, OpDer, OpDerInv, OpLeft, OpRight, OpComm]
OpWord = Tuple[OpAtom, ...]


def _op_atom_key(a: OpAtom):
    if isinstance(a, OpD):
        return (0,)
    if isinstance(a, OpDer):
        return (1, a.tag.value)
    if isinstance(a, OpDerInv):
        return (2, a.tag.value)
    if isinstance(a, OpLeft):
        return (3, word_key(a.word))
    if isinstance(a, OpRight):
        return (4, word_key(a.word))
    return (5, word_key(a.word))


def op_word_key(w: OpWord):
    return (len(w), tuple(_op_atom_key(a) for a in w))


class OpExpr:
    """Linear combination of operator words."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Dict[OpWord, Rat]] = None):
        acc: dict = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                w = tuple(w)
                acc[w] = acc.get(w, Fraction(0)) + c
                if acc[w] == 0:
                    del acc[w]
        object.__setattr__(self, "terms", acc)
        object.__setattr__(self, "_hash", None)

    @staticmethod
    def zero() -> "OpExpr":
        return OpExpr()

    @staticmethod
    def identity() -> "OpExpr":
        return OpExpr({(): 1})

    @staticmethod
    def from_atoms(*atoms: OpAtom) -> "OpExpr":
        return OpExpr({tuple(atoms): 1})

    def __add__(self, other: "OpExpr") -> "OpExpr":
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, Fraction(0)) + c
        return OpExpr(acc)

    def __sub__(self, other: "OpExpr") -> "OpExpr":
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, Fraction(0)) - c
        return OpExpr(acc)

    def __neg__(self) -> "OpExpr":
        return OpExpr({w: -c for w, c in self.terms.items()})

    def scale(self, c: Rat) -> "OpExpr":
        c = Fraction(c)
        return OpExpr({w: c * k for w, k in self.terms.items()})

    def __mul__(self, other: "OpExpr") -> "OpExpr":
        """Composition: (P * Q) f = P(Q(f))."""
        acc: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                acc[w] = acc.get(w, Fraction(0)) + c1 * c2
        return OpExpr(acc)

    def __pow__(self, n: int) -> "OpExpr":
        out = OpExpr.identity()
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OpExpr) and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        from .lang import print_op

        return print_op(self)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: op_word_key(kv[0]))


# -- constructors ------------------------------------------------------------


def op_d() -> OpExpr:
    return OpExpr.from_atoms(OpD())


def op_der(tag: DerivationTag) -> OpExpr:
    return OpExpr.from_atoms(OpDer(tag))


def op_derinv(tag: DerivationTag) -> OpExpr:
    return OpExpr.from_atoms(OpDerInv(tag))


def _mult_op(cls, f: FieldExpr) -> OpExpr:
    acc: dict = {}
    for w, c in f.terms.items():
        acc[(cls(w),)] = acc.get((cls(w),), Fraction(0)) + c
    return OpExpr(acc)


def op_left(f: FieldExpr) -> OpExpr:
    return _mult_op(OpLeft, f)


def op_right(f: FieldExpr) -> OpExpr:
    return _mult_op(OpRight, f)


def op_comm(f: FieldExpr) -> OpExpr:
    return _mult_op(OpComm, f)


# -- application -------------------------------------------------------------


def _apply_atom(atom: OpAtom, f: FieldExpr, ctx: Context) -> FieldExpr:
    if isinstance(atom, OpD):
        return d_total(f, ctx)
    if isinstance(atom, OpDer):
        return der(atom.tag, f, ctx)
    if isinstance(atom, OpDerInv):
        return derinv(atom.tag, f, ctx)
    if isinstance(atom, OpLeft):
        return FieldExpr.from_word(atom.word) * f
    if isinstance(atom, OpRight):
        return f * FieldExpr.from_word(atom.word)
    return commutator(FieldExpr.from_word(atom.word), f)


def apply_op(P: OpExpr, f: FieldExpr, ctx: Context = DEFAULT_CONTEXT) -> FieldExpr:
    """Structural action of an operator expression on a field expression."""
    acc = FieldExpr.zero()
    for word, coeff in P.terms.items():
        cur = f
        for atom in reversed(word):
            cur = _apply_atom(atom, cur, ctx)
        acc = acc + cur.scale(coeff)
    return acc


# -- canonical form ----------------------------------------------------------


def normal_op(P: OpExpr, ctx: Context = DEFAULT_CONTEXT) -> OpExpr:
    """Canonical operator form over the D/DerInv/Left/Right alphabet.

    Commutators and tagged derivations are expanded, adjacent multiplications
    merged (with left factors sorted before right ones, which commute with
    them), D pushed rightward past multiplications, and D cancelled against
    an adjacent matching inverse using the context's commutator field.
    """
    from .fields import _TAG_SIGN

    pending = [(tuple(w), Fraction(c)) for w, c in P.terms.items()]
    done: dict = {}
    guard = 0
    while pending:
        guard += 1
        if guard > 200000:
            raise RuntimeError("operator normalization did not terminate")
        word, coeff = pending.pop()
        if coeff == 0:
            continue
        rewritten = False
        for i, atom in enumerate(word):
            pre, post = word[:i], word[i + 1 :]

            if isinstance(atom, OpComm):
                pending.append((pre + (OpLeft(atom.word),) + post, coeff))
                pending.append((pre + (OpRight(atom.word),) + post, -coeff))
                rewritten = True
                break

            if isinstance(atom, OpDer):
                sign = _TAG_SIGN[atom.tag]
                pending.append((pre + (OpD(),) + post, coeff))
                if sign:
                    field = ctx.tag_field(atom.tag)
                    for w, c in field.terms.items():
                        pending.append((pre + (OpLeft(w),) + post, -sign * coeff * c))
                        pending.append((pre + (OpRight(w),) + post, sign * coeff * c))
                rewritten = True
                break

            if isinstance(atom, OpLeft) and atom.word == ():
                pending.append((pre + post, coeff))
                rewritten = True
                break
            if isinstance(atom, OpRight) and atom.word == ():
                pending.append((pre + post, coeff))
                rewritten = True
                break

            if i + 1 < len(word):
                nxt = word[i + 1]
                rest = word[i + 2 :]
                if isinstance(atom, OpLeft) and isinstance(nxt, OpLeft):
                    pending.append((pre + (OpLeft(atom.word + nxt.word),) + rest, coeff))
                    rewritten = True
                    break
                if isinstance(atom, OpRight) and isinstance(nxt, OpRight):
                    pending.append((pre + (OpRight(nxt.word + atom.word),) + rest, coeff))
                    rewritten = True
                    break
                if isinstance(atom, OpRight) and isinstance(nxt, OpLeft):
                    pending.append((pre + (nxt, atom) + rest, coeff))
                    rewritten = True
                    break
                if isinstance(atom, OpD) and isinstance(nxt, (OpLeft, OpRight)):
                    cls = type(nxt)
                    pending.append((pre + (nxt, atom) + rest, coeff))
                    dword = d_total(FieldExpr.from_word(nxt.word), ctx)
                    for w, c in dword.terms.items():
                        pending.append((pre + (cls(w),) + rest, coeff * c))
                    rewritten = True
                    break
                if (
                    isinstance(atom, OpD)
                    and isinstance(nxt, OpDerInv)
                    and _TAG_SIGN[nxt.tag] != 0
                ):
                    # D = Der(tag) + sign*C(field), so D DerInv = Id + sign*C(field) DerInv
                    sign = _TAG_SIGN[nxt.tag]
                    field = ctx.tag_field(nxt.tag)
                    pending.append((pre + rest, coeff))
                    for w, c in field.terms.items():
                        pending.append((pre + (OpLeft(w), nxt) + rest, sign * coeff * c))
                        pending.append((pre + (OpRight(w), nxt) + rest, -sign * coeff * c))
                    rewritten = True
                    break
                if (
                    isinstance(atom, OpDerInv)
                    and isinstance(nxt, OpD)
                    and _TAG_SIGN[atom.tag] != 0
                ):
                    sign = _TAG_SIGN[atom.tag]
                    field = ctx.tag_field(atom.tag)
                    pending.append((pre + rest, coeff))
                    for w, c in field.terms.items():
                        pending.append((pre + (atom, OpLeft(w)) + rest, sign * coeff * c))
                        pending.append((pre + (atom, OpRight(w)) + rest, -sign * coeff * c))
                    rewritten = True
                    break
                if (
                    isinstance(atom, OpDerInv)
                    and isinstance(nxt, OpDer)
                    and atom.tag == nxt.tag
                ):
                    pending.append((pre + rest, coeff))
                    rewritten = True
                    break
                if (
                    isinstance(atom, OpD)
                    and isinstance(nxt, OpDerInv)
                    and nxt.tag == DerivationTag.PLAIN
                ):
                    pending.append((pre + rest, coeff))
                    rewritten = True
                    break
                if (
                    isinstance(atom, OpDerInv)
                    and isinstance(nxt, OpD)
                    and atom.tag == DerivationTag.PLAIN
                ):
                    pending.append((pre + rest, coeff))
                    rewritten = True
                    break
        if not rewritten:
            done[word] = done.get(word, Fraction(0)) + coeff
    return OpExpr(done)


PROBE = "sigma"


def op_probe_equal(
    P: OpExpr, Q: OpExpr, ctx: Context = DEFAULT_CONTEXT, deep: bool = True
) -> bool:
    """Ground-truth operator equality: act on a fresh probe field and
    normalize the difference to zero."""
    probe = FieldExpr.from_atom(TestField(PROBE, 0))
    diff = apply_op(P - Q, probe, ctx)
    if diff.is_zero():
        return True
    if not deep:
        return False
    return deep_reduce(diff, ctx).is_zero()
