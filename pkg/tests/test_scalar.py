import random
from fractions import Fraction

import pytest

from qjw.errors import SpecializationError
from qjw.scalar import (
    SYMBOLIC,
    LaurentPoly,
    Monomial,
    Mutation,
    Regime,
    Scalar,
    quantum_bracket,
    scalar_arith,
    scalar_inv,
    specialize,
)

q = Scalar.monomial(q=1)
q_inv = Scalar.monomial(q=-1)


def test_small_quantum_integers():
    assert quantum_bracket(0, 0, 0) == 0
    assert quantum_bracket(0, 0, 1) == 1
    assert quantum_bracket(0, 0, -1) == -1
    assert quantum_bracket(0, 0, 2) == q + q_inv
    assert quantum_bracket(0, 0, 3) == Scalar.monomial(q=2) + 1 + Scalar.monomial(q=-2)


def test_bracket_rejects_bad_signs():
    with pytest.raises(ValueError):
        quantum_bracket(2, 0, 1)
    with pytest.raises(ValueError):
        quantum_bracket(0, 3, 1)


def test_cancellation_gives_reduced_parts():
    # (q^2 - q^-2) / (q - q^-1) = q + q^-1, a Laurent polynomial
    value = quantum_bracket(0, 0, 2)
    assert len(value.den) == 1
    assert value * (q - q_inv) == Scalar.monomial(q=2) - Scalar.monomial(q=-2)


def test_field_operations():
    two = quantum_bracket(0, 0, 2)
    assert scalar_arith("add", two, q) == q + two
    assert scalar_arith("sub", two, two) == 0
    assert scalar_arith("mul", two, scalar_inv(two)) == 1
    assert scalar_arith("neg", two) == -two
    assert two / two == 1
    assert (two**-2) * two * two == 1
    with pytest.raises(ValueError):
        scalar_arith("pow", two, two)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        Scalar.zero().inverse()
    with pytest.raises(ZeroDivisionError):
        q / 0


def test_generic_index_identity():
    # q^{i+1}[mu-i] + q^{-mu+2i} = q^i [mu+1-i]
    lhs = Scalar.monomial(q=1, s=1) * quantum_bracket(1, -1, 0) + Scalar.monomial(t=-1, s=2)
    rhs = Scalar.monomial(s=1) * quantum_bracket(1, -1, 1)
    assert lhs == rhs


def test_substitute_index():
    assert quantum_bracket(0, 1, 0).substitute_index(3) == quantum_bracket(0, 0, 3)
    assert quantum_bracket(1, -1, 2).substitute_index(2) == quantum_bracket(1, 0, 0)
    assert quantum_bracket(0, 1, -1).depends_on_index()
    assert not quantum_bracket(0, 1, -1).substitute_index(1).depends_on_index()
    assert not quantum_bracket(0, 1, 0).substitute_index(0)


def test_specialize():
    assert specialize(quantum_bracket(0, 0, 2), Fraction(2), 0) == Fraction(5, 2)
    assert specialize(Scalar.monomial(t=1), Fraction(1, 2), 3) == Fraction(1, 8)
    assert specialize(Scalar.monomial(s=1), Fraction(3), 0, 2) == 9
    with pytest.raises(SpecializationError):
        specialize(quantum_bracket(1, 0, 0).inverse(), Fraction(2), 0)


def test_json_form_round_trips():
    value = quantum_bracket(1, 0, 3) / quantum_bracket(0, 1, 2)
    data = value.to_json()
    assert set(data) == {"num", "den"}
    assert all(set(term) == {"c", "q", "t", "s"} for term in data["num"])
    assert Scalar.from_json(data) == value


def test_laurent_poly_drops_zeros_and_sorts():
    poly = LaurentPoly([(Monomial(q=1), Fraction(1)), (Monomial(q=1), Fraction(-1)), (Monomial(q=-1), Fraction(2))])
    assert len(poly) == 1
    assert poly.terms == {Monomial(q=-1): Fraction(2)}
    assert poly.evaluate(Fraction(2), Fraction(1), Fraction(1)) == 1


def test_regimes():
    assert SYMBOLIC.symbolic
    assert SYMBOLIC.lift(q) is q
    point = Regime(Fraction(3, 2), 20)
    assert point.lift(quantum_bracket(0, 0, 2)) == Fraction(3, 2) + Fraction(2, 3)
    assert point.zero == 0 and isinstance(point.one, Fraction)
    assert point.describe() == "q0=3/2, mu0=20"
    assert Regime(mutation=Mutation.JW_SIGN_FLIP).describe() == "symbolic, mutation=jw_sign_flip"


def random_scalar(rng: random.Random) -> Scalar:
    def atom() -> Scalar:
        if rng.random() < 0.5:
            return quantum_bracket(rng.randint(0, 1), rng.randint(-1, 1), rng.randint(-3, 3))
        exponents = {"q": rng.randint(-2, 2), "t": rng.randint(-1, 1), "s": rng.randint(-1, 1)}
        return Scalar.monomial(**exponents, coeff=rng.randint(-3, 3))

    value = atom()
    for _ in range(rng.randint(0, 2)):
        value = value * atom() if rng.random() < 0.5 else value + atom()
    return value


@pytest.mark.parametrize("seed", range(8))
def test_field_axioms_on_random_scalars(seed):
    rng = random.Random(seed)
    a, b, c = (random_scalar(rng) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if a:
        assert a * a.inverse() == 1


@pytest.mark.parametrize("seed", range(8))
def test_specialize_is_a_ring_homomorphism(seed):
    rng = random.Random(seed)
    a, b = random_scalar(rng), random_scalar(rng)
    point = (Fraction(3, 2), 20, 2)
    assert specialize(a + b, *point) == specialize(a, *point) + specialize(b, *point)
    assert specialize(a * b, *point) == specialize(a, *point) * specialize(b, *point)
    assert specialize(-a, *point) == -specialize(a, *point)


def test_bracket_recurrences():
    # q[mu] + q^-mu = [mu+1]
    assert q * quantum_bracket(1, 0, 0) + Scalar.monomial(t=-1) == quantum_bracket(1, 0, 1)
    # q[mu+1-i] + q^{i-mu-1} = [mu+2-i]
    assert q * quantum_bracket(1, -1, 1) + Scalar.monomial(q=-1, t=-1, s=1) == quantum_bracket(1, -1, 2)
    # q^i[mu+1-i] + q^{i-mu-1}[i] = [mu+1]
    lhs = Scalar.monomial(s=1) * quantum_bracket(1, -1, 1) + Scalar.monomial(q=-1, t=-1, s=1) * quantum_bracket(0, 1, 0)
    assert lhs == quantum_bracket(1, 0, 1)


def test_hash_agrees_with_equality():
    assert hash(Scalar(1)) == hash(1)
    assert hash(Scalar(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert hash(Scalar.zero()) == hash(0)
    assert hash(quantum_bracket(0, 0, 2) * scalar_inv(quantum_bracket(0, 0, 2))) == hash(1)
    assert Scalar(3) in {3}
    assert Fraction(1, 2) in {Scalar(Fraction(1, 2))}
    assert len({quantum_bracket(0, 0, 2), q + q_inv}) == 1


@pytest.mark.parametrize("q0", [Fraction(0), Fraction(1), Fraction(-1)])
def test_specialize_rejects_degenerate_q0(q0):
    with pytest.raises(SpecializationError):
        specialize(Scalar.one(), q0, 3)


def test_specialize_shifted_bracket():
    # [mu+1] at q = 2, mu = 1 is [2] = 2 + 1/2
    assert specialize(quantum_bracket(1, 0, 1), Fraction(2), 1) == Fraction(5, 2)
