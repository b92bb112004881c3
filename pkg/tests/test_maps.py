import pytest

from qjw.errors import ShapeMismatchError
from qjw.maps import (
    BlockedMap,
    block_rank,
    block_trace,
    check_intertwiner,
    compose,
    compose_all,
    equal_up_to,
    export_blocks,
    first_difference,
    identity,
    linear,
    perturbed,
    zero_map,
)
from qjw.models import ModuleShape
from qjw.operators import E_mu_map, F_mu_map, coev_map, e_map, ev_map
from qjw.repmod import LinComb
from qjw.scalar import Scalar, quantum_bracket
from qjw.ux import dump_json

PAIR = ModuleShape.strands(2)
M1 = ModuleShape.verma(1)


def test_identity_is_neutral():
    g = F_mu_map(0)
    assert equal_up_to(compose(identity(g.codomain), g), g, 4)
    assert equal_up_to(compose(g, identity(g.domain)), g, 4)


def test_e_after_f_is_a_multiple_of_identity():
    product = compose(E_mu_map(0), F_mu_map(0))
    expected = identity(M1).scale(quantum_bracket(1, 0, 1))
    assert equal_up_to(product, expected, 5)


def test_loop_value():
    loop = compose(ev_map(), coev_map())
    assert loop.shift == 0
    assert loop.block(0).entries == [[-quantum_bracket(0, 0, 2)]]


def test_composition_is_associative():
    f, g, h = e_map(3, 1), e_map(3, 2), e_map(3, 1)
    assert equal_up_to(compose(compose(f, g), h), compose(f, compose(g, h)), 3)
    assert equal_up_to(compose(compose(f, g), h), f, 3)
    assert equal_up_to(compose_all([f, g, h]), compose(f, compose(g, h)), 3)


def test_compose_checks_shapes():
    with pytest.raises(ShapeMismatchError):
        compose(E_mu_map(0), E_mu_map(0))
    with pytest.raises(ShapeMismatchError):
        linear("add", E_mu_map(0), F_mu_map(0))


def test_linear_combinations():
    f = e_map(2, 1)
    assert equal_up_to(linear("add", f, f.scale(Scalar(-1))), zero_map(PAIR, PAIR), 2)
    doubled = identity(PAIR).scale(quantum_bracket(0, 0, 2))
    assert doubled.block(1).entries[0][0] == quantum_bracket(0, 0, 2)
    assert doubled.block(1).entries[0][1] == 0
    assert equal_up_to(f + f - f, f, 2)


def test_identity_differs_from_zero_on_verma():
    shape = ModuleShape.verma(0)
    assert not equal_up_to(identity(shape), zero_map(shape, shape), 0)
    found = first_difference(identity(shape), zero_map(shape, shape), 3)
    assert found.level == 0 and found.basis == [0]


def test_trace_and_rank():
    assert block_trace(identity(PAIR), 1) == 2
    assert block_rank(identity(PAIR), 1) == 2
    assert block_rank(zero_map(PAIR, PAIR), 1) == 0
    e = e_map(2, 1)
    assert block_trace(e, 1) == -quantum_bracket(0, 0, 2)
    assert block_rank(e, 1) == 1
    with pytest.raises(ShapeMismatchError):
        block_trace(E_mu_map(0), 0)


def test_apply_matches_columns():
    image = e_map(2, 1).apply(LinComb.basis(PAIR, (0, 1)))
    assert image.coefficient((0, 1)) == -Scalar.monomial(q=1)
    assert image.coefficient((1, 0)) == 1


@pytest.mark.parametrize("f", [E_mu_map(0), F_mu_map(0), E_mu_map(2), coev_map(), ev_map()], ids=lambda f: f.name)
def test_operators_are_intertwiners(f):
    report = check_intertwiner(f, 3)
    assert report.passed, report.counterexample


def test_perturbed_map_is_caught():
    broken = perturbed(E_mu_map(0), 1, 0, 1, Scalar.monomial(q=1))
    report = check_intertwiner(broken, 2)
    assert report.status == "fail"
    assert report.counterexample.generator in {"K", "E", "F"}
    assert report.counterexample.residual


def test_blocks_are_memoized_and_thread_safe():
    calls = []

    def compute(level):
        calls.append(level)
        return [[Scalar.one()]]

    f = BlockedMap("counted", ModuleShape.verma(0), ModuleShape.verma(0), 0, compute)
    export_blocks(f, 6, threads=4)
    export_blocks(f, 6, threads=4)
    assert sorted(calls) == list(range(7))


def test_export_is_deterministic_across_thread_counts():
    f = compose(F_mu_map(0), E_mu_map(0))
    serial = dump_json(export_blocks(f, 3, threads=1))
    parallel = dump_json(export_blocks(compose(F_mu_map(0), E_mu_map(0)), 3, threads=4))
    assert serial == parallel


def test_export_layout():
    exported = export_blocks(e_map(2, 1), 5)
    assert [b.level for b in exported.blocks] == [0, 1, 2]
    level_one = exported.blocks[1]
    assert level_one.rows == [[0, 1], [1, 0]]
    assert [entry[:2] for entry in level_one.entries] == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert exported.blocks[0].entries == []
