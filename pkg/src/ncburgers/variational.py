"""Directional (Gateaux/Frechet) derivatives and the Lie bracket of flows.

The directional derivative of a field expression K(r) along V replaces jets
of the base symbol by jets of V one factor at a time.  For operator-valued
functions the product rule applies over compositions, with

    (L_f)' = L_{f'},   D' = 0,
    ID'         = -C_V            (mirror),    DD'    = +C_V  (direct),
    (ID^-1)'    = ID^-1 C_V ID^-1,             (DD^-1)' = -DD^-1 C_V DD^-1,

the last line being the usual derivative of an operator inverse.
"""

from __future__ import annotations

from typing import Optional

from .fields import (
    Context,
    DEFAULT_CONTEXT,
    FieldExpr,
    Integral,
    InverseSymbol,
    Jet,
    TestField,
    commutator,
    normal_field,
    subst_test,
    test,
)
from .operators import (
    OpD,
    OpDer,
    OpDerInv,
    OpExpr,
    OpLeft,
    OpRight,
    op_comm,
    op_derinv,
    op_left,
    op_right,
)
from .reduction import derinv


def _infer_base(K: FieldExpr) -> str:
    symbols = K.jet_symbols()
    if len(symbols) != 1:
        raise ValueError(
            "cannot infer the differentiation symbol from %s; pass base=" % sorted(symbols)
        )
    return next(iter(symbols))


def frechet_field(
    K: FieldExpr,
    direction: str = "V",
    base: Optional[str] = None,
    ctx: Context = DEFAULT_CONTEXT,
) -> FieldExpr:
    """Directional derivative of K along the test field ``direction``.

    The direction symbol must not already occur in K.  Jets of the base
    symbol turn into jets of the direction, one factor at a time;
    antiderivative atoms differentiate through the inverse rule.
    """
    if direction in K.test_names():
        raise ValueError("direction %r already occurs in the expression" % direction)
    if base is None:
        base = _infer_base(K)

    def datom(atom) -> FieldExpr:
        if isinstance(atom, Jet) and atom.symbol == base:
            return FieldExpr.from_atom(TestField(direction, atom.order))
        if isinstance(atom, InverseSymbol):
            return FieldExpr.zero()
        if isinstance(atom, Integral):
            from .fields import TAG_BASE, _TAG_SIGN

            sign = _TAG_SIGN[atom.tag]
            i_val = FieldExpr.from_atom(atom)
            out = derinv(atom.tag, dexpr(atom.body), ctx)
            if sign and TAG_BASE.get(atom.tag) == base:
                # the tagged derivation itself depends on the base symbol
                dirf = FieldExpr.from_atom(TestField(direction, 0))
                out = out + derinv(atom.tag, commutator(dirf, i_val), ctx).scale(sign)
            return out
        return FieldExpr.zero()

    def dexpr(e: FieldExpr) -> FieldExpr:
        acc = FieldExpr.zero()
        for word, coeff in e.terms.items():
            for i, atom in enumerate(word):
                da = datom(atom)
                if da.is_zero():
                    continue
                acc = acc + (
                    FieldExpr.from_word(word[:i]) * da * FieldExpr.from_word(word[i + 1 :])
                ).scale(coeff)
        return acc

    return dexpr(K)


def frechet_op(
    P: OpExpr,
    direction: str = "V",
    base: Optional[str] = None,
    ctx: Context = DEFAULT_CONTEXT,
) -> OpExpr:
    """Directional derivative of an operator expression along ``direction``."""
    from .fields import _TAG_SIGN

    dirf = test(direction)

    from .fields import TAG_BASE

    def datom(atom) -> Optional[OpExpr]:
        if isinstance(atom, OpD):
            return None
        if isinstance(atom, (OpDer, OpDerInv)) and not (
            base is None or TAG_BASE.get(atom.tag) == base
        ):
            return None
        if isinstance(atom, OpDer):
            sign = _TAG_SIGN[atom.tag]
            return op_comm(dirf).scale(-sign) if sign else None
        if isinstance(atom, OpDerInv):
            sign = _TAG_SIGN[atom.tag]
            if not sign:
                return None
            return (op_derinv(atom.tag) * op_comm(dirf) * op_derinv(atom.tag)).scale(sign)
        word = FieldExpr.from_word(atom.word)
        if base is None:
            symbols = word.jet_symbols()
            bsym = next(iter(symbols)) if len(symbols) == 1 else None
        else:
            bsym = base
        if bsym is None:
            return None
        dword = frechet_field(word, direction, bsym, ctx)
        if dword.is_zero():
            return None
        if isinstance(atom, OpLeft):
            return op_left(dword)
        if isinstance(atom, OpRight):
            return op_right(dword)
        return op_comm(dword)

    acc = OpExpr.zero()
    for word, coeff in P.terms.items():
        for i, atom in enumerate(word):
            da = datom(atom)
            if da is None:
                continue
            acc = acc + (OpExpr({word[:i]: 1}) * da * OpExpr({word[i + 1 :]: 1})).scale(coeff)
    return acc


def member_operator(K: FieldExpr, base: Optional[str] = None) -> OpExpr:
    """The directional derivative of K as an operator: K'(r)[V] = member_operator(K) V.

    Requires K free of antiderivatives; each jet occurrence contributes a
    left-prefix, right-suffix multiplication around the matching power of D.
    """
    if K.contains_integral():
        raise ValueError("member operator needs an antiderivative-free expression")
    if base is None:
        base = _infer_base(K)
    acc = OpExpr.zero()
    for word, coeff in K.terms.items():
        for i, atom in enumerate(word):
            if not (isinstance(atom, Jet) and atom.symbol == base):
                continue
            piece = OpExpr.identity()
            if word[:i]:
                piece = piece * op_left(FieldExpr.from_word(word[:i]))
            if word[i + 1 :]:
                piece = piece * op_right(FieldExpr.from_word(word[i + 1 :]))
            for _ in range(atom.order):
                piece = piece * OpExpr.from_atoms(OpD())
            acc = acc + piece.scale(coeff)
    return acc


def lie_bracket(
    K: FieldExpr,
    G: FieldExpr,
    base: Optional[str] = None,
    ctx: Context = DEFAULT_CONTEXT,
) -> FieldExpr:
    """Commutator of evolution vector fields: K'[G] - G'[K]."""
    if K.contains_integral() or G.contains_integral():
        raise ValueError("lie_bracket needs antiderivative-free expressions")
    if base is None:
        base = _infer_base(K + G)
    direction = "V"
    kd = subst_test(frechet_field(K, direction, base, ctx), direction, G, ctx)
    gd = subst_test(frechet_field(G, direction, base, ctx), direction, K, ctx)
    return normal_field(kd - gd, ctx)
