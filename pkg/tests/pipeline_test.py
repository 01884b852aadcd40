from __future__ import annotations

import os.path

import pytest

from phage_opt._circuit import Circuit
from phage_opt._circuit import circuit_from_gates
from phage_opt._circuit import Gate
from phage_opt._cldcl import to_cldcl
from phage_opt._errors import PostPassError
from phage_opt._phase_poly import equivalent
from phage_opt._phase_poly import t_count
from phage_opt._pipeline import emit_circuit
from phage_opt._pipeline import emit_qc
from phage_opt._pipeline import Options
from phage_opt._pipeline import post_pass
from phage_opt._pipeline import run_pipeline
from phage_opt._qc import parse_qc
from phage_opt._verify import equal_up_to_global_phase
from phage_opt._verify import simulate_unitary
from testing.util import RESOURCES


def _load(name):
    with open(os.path.join(RESOURCES, f'{name}.qc')) as f:
        return parse_qc(f.read())


@pytest.mark.parametrize(
    ('families', 'options'),
    (
        (('stomp4', 'stomp5'), Options()),
        (('stomp4', 'stomp5-58'), Options(family='58')),
        (('stomp4',), Options(skip_stomp5=True)),
        (('stomp4',), Options(family='58', skip_stomp5=True)),
    ),
)
def test_options_families(families, options):
    assert options.families == families


@pytest.mark.parametrize(
    ('name', 'initial', 'extra', 'fused'),
    (
        ('tof_3', 21, 2, 15),
        ('barenco_tof_3', 28, 3, 16),
    ),
)
def test_run_pipeline_resources(name, initial, extra, fused):
    form, report = run_pipeline(_load(name), Options(verify=True), name)
    assert report.circuit_name == name
    assert report.wire_count == 5
    assert report.t_count_initial == initial
    assert report.extra_qubits == extra
    assert report.t_after_fusion == fused
    assert report.t_after_stomp == form.t_count == 13
    assert report.t_after_post_pass is None
    assert report.verified is True
    assert report.max_deviation is not None
    assert report.max_deviation <= 1e-9
    assert set(report.wall_times) == {'cldcl', 'stomp', 'verify'}


def test_run_pipeline_identity_circuit():
    form, report = run_pipeline(Circuit(('a', 'b'), ()))
    assert form.extra_qubits == 0
    assert report.t_count_initial == 0
    assert report.t_after_fusion == 0
    assert report.t_after_stomp == 0
    assert report.verified is None


def test_run_pipeline_verify_skipped_when_too_wide():
    _, report = run_pipeline(_load('tof_3'), Options(verify=True, max_sim_wires=4))
    assert report.verified is None
    assert 'verify' not in report.wall_times


def test_run_pipeline_fixpoint_passes():
    _, once = run_pipeline(_load('barenco_tof_3'))
    _, fixpoint = run_pipeline(_load('barenco_tof_3'), Options(passes=0))
    assert fixpoint.t_after_stomp <= once.t_after_stomp
    assert {s['pass'] for s in once.stomp} == {1}


def test_report_to_json():
    _, report = run_pipeline(_load('tof_3'), Options(verify=True), 'tof_3')
    ret = report.to_json()
    assert ret['version'] == 1
    assert ret['circuit'] == 'tof_3'
    assert ret['wireCount'] == 5
    assert ret['extraQubits'] == 2
    assert ret['tAfterFusion'] == 15
    assert ret['tAfterStomp'] == report.t_after_stomp
    assert ret['tAfterPostPass'] is None
    assert ret['verify']['result'] == 'PASS'
    assert [s['family'] for s in ret['stomp']] == ['stomp4', 'stomp5']


def test_report_to_json_without_verify():
    _, report = run_pipeline(Circuit(('a',), ()))
    assert 'verify' not in report.to_json()


def test_post_pass_identity_command():
    form = to_cldcl(_load('tof_3'))
    assert post_pass(form.body, 'cat') == form.body


@pytest.mark.parametrize(
    'cmd',
    (
        pytest.param('false', id='non-zero exit'),
        pytest.param('echo 1 0', id='changes the unitary'),
        pytest.param('echo hello', id='unreadable output'),
        pytest.param('phage-opt-no-such-command', id='missing executable'),
    ),
)
def test_post_pass_errors(cmd):
    form = to_cldcl(_load('tof_3'))
    with pytest.raises(PostPassError):
        post_pass(form.body, cmd)


def test_run_pipeline_post_pass():
    _, report = run_pipeline(_load('tof_3'), Options(post_pass='cat'))
    assert report.t_after_post_pass == report.t_after_stomp
    assert 'postPass' in report.wall_times


def test_emit_circuit_without_ancillas_matches_input():
    c = circuit_from_gates(
        3,
        (
            ('SWAP', (0, 1)), ('T', (0,)), ('CCNOT', (0, 1, 2)),
            ('SWAP', (1, 2)), ('Sdg', (2,)),
        ),
    )
    form, _ = run_pipeline(c)
    assert form.extra_qubits == 0
    assert form.wire_map != (0, 1, 2)
    emitted = emit_circuit(form)
    assert emitted.gates[-2:] == (Gate('SWAP', (0, 1)), Gate('SWAP', (1, 2)))
    assert equal_up_to_global_phase(simulate_unitary(emitted), simulate_unitary(c))


def test_emit_qc_annotates_measurements():
    form, report = run_pipeline(_load('tof_3'))
    text = emit_qc(form)
    lines = text.splitlines()
    assert lines[0] == '.v a b c d e _h0 _h1'
    assert lines[1] == '.i a b c d'
    assert lines[2] == '.o a b c d'
    measures = [line for line in lines if line.startswith('# measure')]
    assert len(measures) == 2
    assert measures[0].endswith(' X -> s0')
    assert '# if s0: X _h0' in lines
    assert '# if s1: X _h1' in lines

    reparsed = parse_qc(text)
    assert reparsed.wires == form.wires
    t_lines = [g for g in reparsed.gates if g.kind in {'T', 'Tdg'}]
    assert len(t_lines) == report.t_after_stomp == t_count(form.body)


def test_emit_qc_single_t():
    form, _ = run_pipeline(circuit_from_gates(('a', 'b'), (('T', (1,)),)))
    text = emit_qc(form)
    assert 'T b\n' in text
    assert '.i ' not in text
    assert '# measure' not in text
    assert equivalent(form.body, to_cldcl(parse_qc(text)).body)
