"""Canonical handling of formal antiderivatives.

The tagged derivation (``ID`` for mirror, ``DD`` for direct) acts on jets of
its base symbol like an ordinary jet-raising derivation once expressions are
rewritten in the matching "eta" coordinates: the order-k eta jet of a symbol
is its k-fold tagged derivative.  In that basis the derivation E satisfies

    E(eta-jet k)        = eta-jet k+1
    E(antiderivative I) = body of I

with the plain Leibniz rule and no commutator corrections.  Applying the
formal inverse then reduces to integrating a free-algebra polynomial with
respect to a jet-raising derivation, done greedily: repeatedly take the
largest remaining word under a fixed term order (outermost jets first),
construct the one preimage candidate (lower the outermost positive jet, or
wrap the innermost factor in a fresh antiderivative), and accept it only if
the leading word of its derivative is exactly the word being eliminated.
Rejected words freeze into antiderivative atoms; an exact derivative
therefore unwraps completely while anything else splits into an integrated
part plus irreducible atoms, deterministically.  The direct family reads
words from the right, mirroring every choice.

``deep_reduce`` extends this to products mixing antiderivative atoms with
further factors: every such word is replaced by the antiderivative of its
own tagged derivative (innermost trailing factors first), which lines up the
integration-by-parts presentations of one value.  This is the engine's
bounded integration-by-parts strategy; it raises
:class:`NestingLimitExceeded` instead of looping when the nesting depth or
round budget is exhausted.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .fields import (
    Context,
    DEFAULT_CONTEXT,
    DerivationTag,
    FieldExpr,
    Integral,
    Jet,
    NestingLimitExceeded,
    TAG_BASE,
    TestField,
    Word,
    der,
    expr_nesting,
    jet,
)

# eta atoms are plain tuples:
#   ('j', symbol, k)   eta jet of a base symbol
#   ('t', name, k)     eta jet of a test field
#   ('i', body)        antiderivative, body = frozen eta expression
EtaAtom = tuple
EtaWord = Tuple[EtaAtom, ...]
EtaExpr = Dict[EtaWord, Fraction]


class _ForeignAtom(Exception):
    """Word contains an atom the eta basis cannot express."""


def _freeze(e: EtaExpr):
    return tuple(sorted(e.items(), key=lambda kv: _word_sort(kv[0])))


def _thaw(fro) -> EtaExpr:
    return dict(fro)


def _atom_sort(a: EtaAtom):
    if a[0] == "j":
        return (0, a[1], a[2])
    if a[0] == "t":
        return (1, a[1], a[2])
    return (2, tuple((_word_sort(w), c) for w, c in a[1]))


def _word_sort(w: EtaWord):
    return (len(w), tuple(_atom_sort(a) for a in w))


def _rank(a: EtaAtom) -> int:
    return a[2] if a[0] in ("j", "t") else -1


def _atom_mass(a: EtaAtom) -> int:
    if a[0] != "i":
        return 0
    return 1 + max((_mass(w) for w, _ in a[1]), default=0)


def _mass(w: EtaWord) -> int:
    return sum(_atom_mass(a) for a in w)


def _flip(tag: DerivationTag) -> bool:
    """The direct family is the left/right mirror image of the mirror one,
    so its canonical choices read words from the other end."""
    return tag == DerivationTag.DIRECT


_GKEY_CACHE: Dict[Tuple[bool, EtaWord], tuple] = {}


def _greedy_key(w: EtaWord, flip: bool):
    """Processing order: highest jets first, fewest antiderivatives next."""
    key = _GKEY_CACHE.get((flip, w))
    if key is None:
        ranks = tuple(_rank(a) for a in (reversed(w) if flip else w))
        key = (ranks, -_mass(w), _word_sort(w))
        _GKEY_CACHE[(flip, w)] = key
    return key


class _ByKeyDesc:
    """Heap entry ordered by descending greedy key."""

    __slots__ = ("key", "word")

    def __init__(self, key, word):
        self.key = key
        self.word = word

    def __lt__(self, other):
        return self.key > other.key


def _add_into(acc: EtaExpr, w: EtaWord, c: Fraction) -> None:
    cur = acc.get(w)
    new = (cur if cur is not None else Fraction(0)) + c
    if new == 0:
        acc.pop(w, None)
    else:
        acc[w] = new


def _eta_d_word(w: EtaWord) -> EtaExpr:
    """The jet-raising derivation E applied to one eta word."""
    out: EtaExpr = {}
    for i, a in enumerate(w):
        if a[0] in ("j", "t"):
            raised = w[:i] + ((a[0], a[1], a[2] + 1),) + w[i + 1 :]
            _add_into(out, raised, Fraction(1))
        else:
            for bw, bc in a[1]:
                _add_into(out, w[:i] + bw + w[i + 1 :], bc)
    return out


def _candidate(w: EtaWord, flip: bool) -> Optional[EtaWord]:
    if not w:
        return None
    # the leading word of E(u) raises u's outermost raisable factor, so the
    # candidate preimage lowers the outermost positive jet (leftmost for
    # mirror, rightmost for direct)
    order = range(len(w) - 1, -1, -1) if flip else range(len(w))
    for i in order:
        if _rank(w[i]) >= 1:
            a = w[i]
            return w[:i] + ((a[0], a[1], a[2] - 1),) + w[i + 1 :]
    # nothing left to lower: wrap the innermost factor
    i = 0 if flip else len(w) - 1
    wrapped = ("i", _freeze({(w[i],): Fraction(1)}))
    return w[:i] + (wrapped,) + w[i + 1 :]


def _greedy_split(f: EtaExpr, rounds: int, flip: bool) -> Tuple[EtaExpr, EtaExpr]:
    """Split f = E(g) + h with h made of words the greedy scheme rejects."""

    def key(w):
        return _greedy_key(w, flip)

    work = dict(f)
    heap = [_ByKeyDesc(key(w), w) for w in work]
    heapq.heapify(heap)
    g: EtaExpr = {}
    h: EtaExpr = {}
    budget = rounds
    while heap:
        w = heapq.heappop(heap).word
        c = work.get(w)
        if c is None:
            continue  # stale entry
        budget -= 1
        if budget < 0:
            raise NestingLimitExceeded("antiderivative splitting exceeded round budget")
        u = _candidate(w, flip)
        done = False
        if u is not None:
            image = _eta_d_word(u)
            if image and max(image, key=key) == w:
                ratio = c / image[w]
                _add_into(g, u, ratio)
                for iw, ic in image.items():
                    was_present = iw in work
                    _add_into(work, iw, -ratio * ic)
                    if iw in work and not was_present:
                        heapq.heappush(heap, _ByKeyDesc(key(iw), iw))
                done = True
        if not done:
            _add_into(h, w, c)
            del work[w]
    return g, h


# ---------------------------------------------------------------------------
# conversion between x jets and eta jets

_X2ETA: Dict[tuple, EtaExpr] = {}
_ETA2X: Dict[tuple, FieldExpr] = {}


def _tag_sign(tag: DerivationTag) -> int:
    from .fields import _TAG_SIGN

    return _TAG_SIGN[tag]


def _eta_dtotal(tag: DerivationTag, f: EtaExpr) -> EtaExpr:
    """The plain x-derivative expressed in eta coordinates: E + sign*[base, .]."""
    out: EtaExpr = {}
    for w, c in f.items():
        for iw, ic in _eta_d_word(w).items():
            _add_into(out, iw, c * ic)
    sign = _tag_sign(tag)
    if sign:
        base = ("j", TAG_BASE[tag], 0)
        for w, c in f.items():
            _add_into(out, (base,) + w, sign * c)
            _add_into(out, w + (base,), -sign * c)
    return out


def _x_jet_to_eta(tag: DerivationTag, kind: str, name: str, order: int) -> EtaExpr:
    key = (tag, kind, name, order)
    if key in _X2ETA:
        return _X2ETA[key]
    if order == 0:
        out: EtaExpr = {((kind, name, 0),): Fraction(1)}
    else:
        out = _eta_dtotal(tag, _x_jet_to_eta(tag, kind, name, order - 1))
    _X2ETA[key] = out
    return out


def _to_eta_atom(tag: DerivationTag, atom) -> EtaExpr:
    if isinstance(atom, Jet):
        return _x_jet_to_eta(tag, "j", atom.symbol, atom.order)
    if isinstance(atom, TestField):
        return _x_jet_to_eta(tag, "t", atom.name, atom.order)
    if isinstance(atom, Integral) and atom.tag == tag:
        return {(("i", _freeze(_to_eta_expr(tag, atom.body))),): Fraction(1)}
    raise _ForeignAtom


def _to_eta_word(tag: DerivationTag, word: Word) -> EtaExpr:
    out: EtaExpr = {(): Fraction(1)}
    for atom in word:
        factor = _to_eta_atom(tag, atom)
        nxt: EtaExpr = {}
        for w1, c1 in out.items():
            for w2, c2 in factor.items():
                _add_into(nxt, w1 + w2, c1 * c2)
        out = nxt
    return out


def _to_eta_expr(tag: DerivationTag, f: FieldExpr) -> EtaExpr:
    out: EtaExpr = {}
    for w, c in f.terms.items():
        for ew, ec in _to_eta_word(tag, w).items():
            _add_into(out, ew, c * ec)
    return out


def _eta_jet_to_x(
    tag: DerivationTag, kind: str, name: str, order: int, ctx: Context
) -> FieldExpr:
    key = (tag, kind, name, order)
    if key in _ETA2X:
        return _ETA2X[key]
    if order == 0:
        out = FieldExpr.from_atom(Jet(name, 0) if kind == "j" else TestField(name, 0))
    else:
        out = der(tag, _eta_jet_to_x(tag, kind, name, order - 1, ctx), ctx)
    _ETA2X[key] = out
    return out


def _from_eta_word(tag: DerivationTag, w: EtaWord, ctx: Context) -> FieldExpr:
    out = FieldExpr.unit()
    for a in w:
        if a[0] in ("j", "t"):
            out = out * _eta_jet_to_x(tag, a[0], a[1], a[2], ctx)
        else:
            body = _from_eta_expr(tag, _thaw(a[1]), ctx)
            out = out * _integral_atom(tag, body, ctx)
    return out


def _from_eta_expr(tag: DerivationTag, f: EtaExpr, ctx: Context) -> FieldExpr:
    acc = FieldExpr.zero()
    for w, c in f.items():
        acc = acc + _from_eta_word(tag, w, ctx).scale(c)
    return acc


def _integral_atom(tag: DerivationTag, body: FieldExpr, ctx: Context) -> FieldExpr:
    if body.is_zero():
        return body
    atom = Integral(tag, body)
    if 1 + expr_nesting(body) > ctx.integral_depth:
        raise NestingLimitExceeded(
            "antiderivative nesting exceeded depth %d" % ctx.integral_depth
        )
    return FieldExpr.from_atom(atom)


def _standard_field(tag: DerivationTag, ctx: Context) -> bool:
    if tag == DerivationTag.PLAIN:
        return not ctx.tag_field(tag)
    return ctx.tag_field(tag) == jet(TAG_BASE[tag])


def derinv(
    tag: DerivationTag, f: FieldExpr, ctx: Context = DEFAULT_CONTEXT
) -> FieldExpr:
    """Apply the formal inverse derivation canonically.

    Exact derivatives unwrap completely; anything else splits into an
    integrated part plus antiderivative atoms with irreducible bodies.  In a
    context whose commutator field is not the plain base jet (the Cole-Hopf
    substitution), no splitting is attempted and bodies are kept verbatim.
    """
    if f.is_zero():
        return f
    if not _standard_field(tag, ctx):
        return _integral_atom(tag, f, ctx)

    eta: EtaExpr = {}
    foreign = FieldExpr.zero()
    for w, c in f.terms.items():
        try:
            for ew, ec in _to_eta_word(tag, w).items():
                _add_into(eta, ew, c * ec)
        except _ForeignAtom:
            foreign = foreign + _integral_atom(tag, FieldExpr.from_word(w), ctx).scale(c)

    g, h = _greedy_split(eta, ctx.reduce_rounds, _flip(tag))
    out = _from_eta_expr(tag, g, ctx) + foreign
    for w, c in h.items():
        body = _from_eta_word(tag, w, ctx)
        out = out + _integral_atom(tag, body, ctx).scale(c)
    return out


def _word_tag(word: Word) -> Optional[DerivationTag]:
    tags = {a.tag for a in word if isinstance(a, Integral)}
    if len(tags) == 1:
        return next(iter(tags))
    return None


def _is_mixed(word: Word) -> bool:
    return len(word) >= 2 and any(isinstance(a, Integral) for a in word)


def _canon_word(word: Word, ctx: Context, cache: dict) -> FieldExpr:
    """Canonical value of one word, rewriting innermost products first."""
    if word in cache:
        return cache[word]
    out = FieldExpr.from_word(word)
    if _is_mixed(word):
        tag = _word_tag(word)
        if tag is not None and _standard_field(tag, ctx):
            if _flip(tag):
                inner, outer = word[:-1], word[-1:]
            else:
                inner, outer = word[1:], word[:1]
            if _is_mixed(inner):
                inner_val = _canon_word(inner, ctx, cache)
                if inner_val != FieldExpr.from_word(inner):
                    if _flip(tag):
                        out = inner_val * FieldExpr.from_word(outer)
                    else:
                        out = FieldExpr.from_word(outer) * inner_val
                    cache[word] = out
                    return out
            out = derinv(tag, der(tag, FieldExpr.from_word(word), ctx), ctx)
    cache[word] = out
    return out


def deep_reduce(f: FieldExpr, ctx: Context = DEFAULT_CONTEXT) -> FieldExpr:
    """Bounded integration-by-parts normalization.

    Every word that multiplies an antiderivative atom by further factors is
    rewritten as the antiderivative of its own tagged derivative, innermost
    trailing products first.  Each rewrite preserves the value of the word,
    so the result equals the input as an abstract field; iterated to a fixed
    point within the context's round budget.
    """
    cache: dict = {}
    cur = f
    for _ in range(ctx.reduce_passes):
        out = FieldExpr.zero()
        changed = False
        for word, coeff in cur.terms.items():
            val = _canon_word(word, ctx, cache)
            if val != FieldExpr.from_word(word):
                changed = True
            out = out + val.scale(coeff)
        cur = out
        if not changed:
            return cur
    raise NestingLimitExceeded("deep reduction did not reach a fixed point")
