from ncburgers.fields import test as tfield
import random

from ncburgers.fields import DerivationTag, FieldExpr, commutator, d_total, der, jet
from ncburgers.operators import (
    OpExpr,
    apply_op,
    normal_op,
    op_comm,
    op_d,
    op_der,
    op_derinv,
    op_left,
    op_probe_equal,
    op_right,
)
from ncburgers.reduction import derinv

from conftest import random_field

M = DerivationTag.MIRROR
r, rx = jet("r"), jet("r", 1)
sigma = tfield("sigma")


def test_apply_expanded_recursion_operator():
    phi = op_d() + op_right(r) + op_left(rx) * op_derinv(M)
    out = apply_op(phi, sigma)
    expected = tfield("sigma", 1) + sigma * r + rx * derinv(M, sigma)
    assert out == expected


def test_apply_commutator_on_base_is_zero():
    assert apply_op(op_comm(r), r).is_zero()


def test_factored_equals_expanded():
    phi_fac = op_der(M) * (op_d() + op_right(r)) * op_derinv(M)
    phi_exp = op_d() + op_right(r) + op_left(rx) * op_derinv(M)
    assert apply_op(phi_fac, sigma) == apply_op(phi_exp, sigma)
    assert op_probe_equal(phi_fac, phi_exp)


def test_commutator_expands():
    assert op_probe_equal(op_comm(r), op_left(r) - op_right(r))


def test_d_derinv_order_matters():
    assert not op_probe_equal(op_d() * op_derinv(M), op_derinv(M) * op_d())


def test_left_multiplications_merge():
    rng = random.Random(31)
    for _ in range(40):
        a = random_field(rng)
        b = random_field(rng)
        assert op_probe_equal(op_left(a) * op_left(b), op_left(a * b))
        assert op_probe_equal(op_right(a) * op_right(b), op_right(b * a))
        assert op_probe_equal(op_left(a) * op_right(b), op_right(b) * op_left(a))


def test_derivation_commutation_with_multiplications():
    rng = random.Random(37)
    for _ in range(25):
        a = random_field(rng, symbols=("r",))
        lhs = op_der(M) * op_left(a) - op_left(a) * op_der(M)
        assert op_probe_equal(lhs, op_left(der(M, a)))
        rhs = op_der(M) * op_right(a) - op_right(a) * op_der(M)
        assert op_probe_equal(rhs, op_right(der(M, a)))


def test_d_with_mirror_derivation_commutator():
    # [ID, D] applied to a probe equals the commutator with r_x
    lhs = op_der(M) * op_d() - op_d() * op_der(M)
    assert op_probe_equal(lhs, op_comm(rx))


def test_normal_op_expands_and_merges():
    raw = op_comm(r) * op_left(rx)
    canon = normal_op(raw)
    assert op_probe_equal(raw, canon)
    # no commutator atoms survive
    from ncburgers.operators import OpComm

    assert not any(isinstance(a, OpComm) for w in canon.terms for a in w)


def test_normal_op_cancels_derivation_against_inverse():
    assert normal_op(op_der(M) * op_derinv(M)) == OpExpr.identity()
    assert normal_op(op_derinv(M) * op_der(M)) == OpExpr.identity()


def test_op_power_and_identity():
    phi = op_d() + op_right(r)
    assert op_probe_equal(phi ** 0, OpExpr.identity())
    assert op_probe_equal(phi ** 2, phi * phi)


def test_probe_equality_respects_scaling():
    phi = op_d() + op_right(r)
    assert not op_probe_equal(phi, phi.scale(2))
