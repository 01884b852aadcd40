from __future__ import annotations

import json
import os.path
import random

import pytest

from phage_opt._circuit import circuit_from_gates
from phage_opt._circuit import expand_multi_controls
from phage_opt._circuit import Gate
from phage_opt._cldcl import canonicalize
from phage_opt._cldcl import correction_layers
from phage_opt._cldcl import diagonalize
from phage_opt._cldcl import form_from_json
from phage_opt._cldcl import form_stats
from phage_opt._cldcl import form_to_json
from phage_opt._cldcl import gadgetize
from phage_opt._cldcl import gadgetize_hadamard
from phage_opt._cldcl import MeasurementEvent
from phage_opt._cldcl import normalize_gates
from phage_opt._cldcl import Stages
from phage_opt._cldcl import start_gadgetizing
from phage_opt._cldcl import to_cldcl
from phage_opt._phase_poly import mask
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._qc import parse_qc
from phage_opt._stomp import run_strategy
from phage_opt._verify import equal_up_to_global_phase
from phage_opt._verify import gate_matrix
from phage_opt._verify import simulate_cldcl_postselected
from phage_opt._verify import simulate_unitary
from testing.util import random_circuit
from testing.util import RESOURCES


def _stages(width, body):
    return Stages(
        wires=tuple(f'q{i}' for i in range(width)),
        initial=(),
        body=tuple(body),
        final=(),
        wire_map=tuple(range(width)),
    )


def _load(name):
    with open(os.path.join(RESOURCES, f'{name}.qc')) as f:
        return parse_qc(f.read())


def _assert_same_unitary(c, form):
    expected = simulate_unitary(expand_multi_controls(c))
    actual = simulate_cldcl_postselected(form)
    assert equal_up_to_global_phase(actual, expected)


def test_normalize_toffoli():
    c = circuit_from_gates(('a', 'b', 'c'), (('CCNOT', (0, 1, 2)),))
    stages = normalize_gates(c)
    assert stages.initial == (Gate('H', (2,)),)
    assert stages.body == (Gate('CCZ', (0, 1, 2)),)
    assert stages.final == (Gate('H', (2,)),)
    assert stages.wire_map == (0, 1, 2)


def test_normalize_cancels_hadamard_pair():
    c = circuit_from_gates(1, (('H', (0,)), ('H', (0,))))
    assert normalize_gates(c) == _stages(1, ())


def test_normalize_resolves_swaps():
    c = circuit_from_gates(2, (('SWAP', (0, 1)), ('T', (0,))))
    stages = normalize_gates(c)
    assert stages.body == (Gate('T', (1,)),)
    assert stages.wire_map == (1, 0)


def test_normalize_keeps_blocked_hadamard():
    c = circuit_from_gates(1, (('T', (0,)), ('H', (0,)), ('T', (0,))))
    stages = normalize_gates(c)
    assert stages.body == (Gate('T', (0,)), Gate('H', (0,)), Gate('T', (0,)))


def test_normalize_commutes_hadamard_through_cnot():
    c = circuit_from_gates(
        2,
        (('T', (1,)), ('CNOT', (0, 1)), ('T', (1,)), ('CNOT', (0, 1))),
    )
    stages = normalize_gates(c)
    assert not any(g.kind == 'H' for g in stages.body)


def test_normalize_rejects_mcnot():
    c = circuit_from_gates(4, (('MCNOT', (0, 1, 2, 3)),))
    with pytest.raises(ValueError):
        normalize_gates(c)


def test_gadgetize_single_hadamard():
    g = gadgetize(_stages(1, (Gate('H', (0,)),)))
    assert g.wires == ('q0', '_h0')
    assert g.preps == (1,)
    assert g.body == (Gate('CZ', (0, 1)),)
    assert g.measurements == (
        MeasurementEvent(wire=0, label='s0', corrections=(Gate('X', (1,)),)),
    )
    assert g.wire_map == (1,)

    form = diagonalize(g)
    assert form.width == 2
    actual = simulate_cldcl_postselected(form)
    assert equal_up_to_global_phase(actual, gate_matrix(Gate('H', (0,))))


def test_gadgetize_reroutes_later_gates():
    g = start_gadgetizing(
        _stages(
            2,
            (Gate('H', (0,)), Gate('T', (0,)), Gate('CZ', (0, 1))),
        )._replace(final=(Gate('H', (0,)),)),
    )
    g = gadgetize_hadamard(g, 0)
    assert g.body == (Gate('CZ', (0, 2)), Gate('T', (2,)), Gate('CZ', (2, 1)))
    assert g.final == (Gate('H', (2,)),)
    assert g.wire_map == (2, 1)


def test_gadgetize_hadamard_wrong_position():
    g = start_gadgetizing(_stages(1, (Gate('T', (0,)),)))
    with pytest.raises(ValueError):
        gadgetize_hadamard(g, 0)


def test_gadgetize_repeated_wire_uses_fresh_ancillas():
    body = (Gate('H', (0,)), Gate('T', (0,)), Gate('H', (0,)))
    g = gadgetize(_stages(1, body))
    assert g.wires == ('q0', '_h0', '_h1')
    assert [e.wire for e in g.measurements] == [0, 1]
    assert [e.label for e in g.measurements] == ['s0', 's1']
    assert g.wire_map == (2,)


@pytest.mark.parametrize(
    ('body', 'expected', 'linear'),
    (
        pytest.param((Gate('S', (1,)),), {mask((1,)): 2}, (), id='S'),
        pytest.param(
            (Gate('X', (1,)), Gate('T', (1,))),
            {mask((1,)): 7},
            (Gate('X', (1,)),),
            id='X before T',
        ),
        pytest.param(
            (
                Gate('T', (1,)), Gate('CNOT', (1, 2)),
                Gate('T', (2,)), Gate('CNOT', (1, 2)),
            ),
            {mask((1,)): 1, mask((1, 2)): 1},
            (Gate('CNOT', (1, 2)), Gate('CNOT', (1, 2))),
            id='T through a CNOT pair',
        ),
        pytest.param(
            (Gate('CCZ', (0, 1, 2)),),
            {1: 1, 2: 1, 4: 1, 3: 7, 5: 7, 6: 7, 7: 1},
            (),
            id='CCZ',
        ),
    ),
)
def test_diagonalize(body, expected, linear):
    form = diagonalize(start_gadgetizing(_stages(3, body)))
    assert form.body == PhasePolynomial(3, expected)
    assert form.linear == linear


def test_diagonalize_rejects_hadamard():
    with pytest.raises(AssertionError):
        diagonalize(start_gadgetizing(_stages(1, (Gate('H', (0,)),))))


def test_diagonalize_matches_circuit():
    c = circuit_from_gates(
        3,
        (
            ('T', (1,)), ('CNOT', (1, 2)), ('T', (2,)), ('CNOT', (1, 2)),
            ('X', (0,)), ('CCZ', (0, 1, 2)), ('Tdg', (0,)),
        ),
    )
    form = diagonalize(start_gadgetizing(_stages(3, c.gates)))
    _assert_same_unitary(c, form)


def test_canonicalize():
    form = to_cldcl(circuit_from_gates(1, (('T', (0,)),)))
    form = form._replace(
        body=PhasePolynomial(1, {1: 0}),
        measurements=(
            MeasurementEvent(0, 's10', ()),
            MeasurementEvent(0, 's2', ()),
        ),
    )
    ret = canonicalize(form)
    assert ret.body.terms == {}
    assert [e.label for e in ret.measurements] == ['s2', 's10']


def test_to_cldcl_interior_hadamard():
    c = circuit_from_gates(1, (('T', (0,)), ('H', (0,)), ('T', (0,))))
    form = to_cldcl(c)
    assert form.extra_qubits == 1
    assert form.t_count == 2
    assert correction_layers(form) == (('s0', (Gate('X', (1,)),)),)
    _assert_same_unitary(c, form)


def test_to_cldcl_hoists_boundary_hadamards():
    c = circuit_from_gates(1, (('H', (0,)), ('T', (0,)), ('H', (0,))))
    form = to_cldcl(c)
    assert form.extra_qubits == 0
    assert form.initial == (Gate('H', (0,)),)
    assert form.final == (Gate('H', (0,)),)
    _assert_same_unitary(c, form)


def test_to_cldcl_mcnot_counts_ladder_ancillas():
    c = circuit_from_gates(4, (('MCNOT', (0, 1, 2, 3)),))
    form = to_cldcl(c)
    assert form.n_original == 4
    assert form.extra_qubits == form.width - 4
    _assert_same_unitary(c, form)


@pytest.mark.parametrize(
    ('name', 'extra', 'fused'),
    (
        ('tof_3', 2, 15),
        ('barenco_tof_3', 3, 16),
    ),
)
def test_to_cldcl_resources(name, extra, fused):
    c = _load(name)
    form = to_cldcl(c)
    assert form.extra_qubits == extra
    assert form.t_count == fused
    assert form_stats(form) == {
        'width': c.wire_count + extra,
        'extraQubits': extra,
        'tCountAfterFusion': fused,
    }
    _assert_same_unitary(c, form)


@pytest.mark.parametrize(
    ('name', 'wires', 'extra', 'fused'),
    (
        ('vbe_adder_3', 10, 4, 24),
        ('gf2^4_mult', 12, 0, 68),
    ),
)
def test_to_cldcl_wide_resources(name, wires, extra, fused):
    form = to_cldcl(_load(name))
    assert form.n_original == wires
    assert form.extra_qubits == extra
    assert form.width == wires + extra
    assert form.t_count == fused


def test_to_cldcl_random_circuits():
    rng = random.Random(2024)
    checked = 0
    for _ in range(200):
        c = random_circuit(rng, rng.randint(1, 6), rng.randint(0, 30))
        form = to_cldcl(c)
        if form.width > 12:
            continue
        _assert_same_unitary(c, form)
        _assert_same_unitary(c, form._replace(body=run_strategy(form.body)))
        checked += 1
    assert checked


def test_form_json_round_trip():
    form = to_cldcl(_load('tof_3'))
    obj = json.loads(json.dumps(form_to_json(form)))
    assert obj['width'] == form.width
    assert obj['nOriginal'] == 5
    assert obj['inputs'] == obj['outputs'] == [0, 1, 2, 3]
    assert form_from_json(obj) == form


def test_form_from_json_width_mismatch():
    obj = form_to_json(to_cldcl(circuit_from_gates(1, ())))
    obj['width'] = 3
    with pytest.raises(ValueError):
        form_from_json(obj)
