from fractions import Fraction

import pytest

from qjw.maps import block_rank, block_trace, compose, equal_up_to, identity
from qjw.models import ModuleShape
from qjw.projectors import ejw, jw, tower_normalizer, verify_jw, verify_lemmas, verify_theorem
from qjw.repmod import enumerate_basis
from qjw.scalar import Mutation, Regime, Scalar, quantum_bracket

q = Scalar.monomial(q=1)
q_inv = Scalar.monomial(q=-1)
two = quantum_bracket(0, 0, 2)
POINT = Regime(Fraction(3, 2), 20)


def test_first_projectors():
    assert equal_up_to(jw(1), identity(ModuleShape.strands(1)), 1)
    p = jw(2)
    assert p.column((0, 1)) == {(0, 1): q_inv / two, (1, 0): 1 / two}
    assert p.column((0, 0)) == {(0, 0): 1}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_jones_wenzl_suite(n):
    reports = verify_jw(n, threads=2)
    assert len(reports) == 1 + 2 * (n - 1)
    assert reports[0].claim == f"jw[{n}]:P∘P=P"
    assert all(r.passed for r in reports), [r.claim for r in reports if not r.passed]


def test_jw_sign_flip_breaks_idempotency():
    reports = verify_jw(2, regime=Regime(mutation=Mutation.JW_SIGN_FLIP))
    assert reports[0].status == "fail"
    assert reports[0].counterexample is not None


def test_extended_projector_blocks():
    p = ejw(1)
    assert p.block(0).entries == [[1]]
    level_one = p.block(1)
    assert level_one.cols == ((0, 1), (1, 0))
    denominator = quantum_bracket(1, 0, 1)
    mu = quantum_bracket(1, 0, 0)
    t_inv = Scalar.monomial(t=-1)
    expected = [[t_inv / denominator, q * t_inv / denominator], [mu / denominator, q * mu / denominator]]
    assert level_one.entries == expected
    assert block_trace(p, 1) == 1


def test_extended_projector_is_idempotent():
    p = ejw(1)
    assert equal_up_to(compose(p, p), p, 5)


@pytest.mark.parametrize("n", [1, 2])
def test_rank_and_trace_per_level(n):
    p = ejw(n)
    for level in range(4):
        assert block_trace(p, level) == 1
        assert block_rank(p, level) == 1
        complement = identity(p.domain) - p
        assert block_rank(complement, level) == len(enumerate_basis(p.domain, level)) - 1


def test_theorem_suite_for_two_strands():
    reports = verify_theorem(2, 3, threads=2)
    assert [r.claim for r in reports] == [
        "ejw[2]:P∘P=P",
        "ejw[2]:ev[1]∘P=0",
        "ejw[2]:(Id⊗e[1])∘P=0",
        "ejw[2]:P∘coev[1]=0",
        "ejw[2]:P∘(Id⊗e[1])=0",
        "ejw[2]:E_tower∘F_tower=[mu+1]...[mu+2]Id",
        "ejw[2]:rank=1,trace=1",
    ]
    assert [r.derived for r in reports] == [False, False, True, False, True, True, True]
    assert all(r.passed for r in reports)


def test_theorem_suite_for_one_strand_has_no_strand_claims():
    reports = verify_theorem(1, 4)
    assert len(reports) == 3
    assert all(r.passed for r in reports)


def test_dropped_normalizer_is_caught():
    reports = verify_theorem(1, 2, regime=Regime(mutation=Mutation.DROP_EJW_NORMALIZER))
    assert reports[0].status == "fail"
    assert reports[0].counterexample.level == 0


def test_lemma_suite():
    reports = verify_lemmas(4, range(2))
    assert len(reports) == 6
    assert reports[0].claim == "lemma[mu]:E∘F=[mu+1]Id"
    assert all(r.passed for r in reports)


def test_perturbed_f_fails_lemmas():
    reports = verify_lemmas(3, regime=Regime(mutation=Mutation.PERTURB_F_COEFFICIENT))
    assert reports[0].status == "fail"


def test_specialized_regime_agrees():
    assert all(r.passed for r in verify_theorem(2, 3, regime=POINT))
    assert all(r.passed for r in verify_jw(3, regime=POINT))
    assert all(r.passed for r in verify_lemmas(3, range(2), regime=POINT))
    entry = ejw(1, POINT).block(1).entries[0][0]
    assert isinstance(entry, Fraction)


def test_normalizer_product():
    assert tower_normalizer(2) == quantum_bracket(1, 0, 1) * quantum_bracket(1, 0, 2)


@pytest.mark.slow
def test_acceptance_scale_theorem():
    assert all(r.passed for r in verify_theorem(3, 5))
