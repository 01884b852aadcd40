from __future__ import annotations

import shlex
import subprocess
import time
from typing import Any
from typing import NamedTuple

from phage_opt._circuit import Circuit
from phage_opt._circuit import expand_multi_controls
from phage_opt._circuit import Gate
from phage_opt._circuit import t_count_of
from phage_opt._cldcl import ClDClForm
from phage_opt._cldcl import correction_layers
from phage_opt._cldcl import to_cldcl
from phage_opt._errors import PostPassError
from phage_opt._phase_poly import equivalent
from phage_opt._phase_poly import format_poly
from phage_opt._phase_poly import parse_poly
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._phase_poly import resynthesize
from phage_opt._phase_poly import t_count
from phage_opt._qc import format_gate
from phage_opt._qc import write_qc
from phage_opt._stomp import run_strategy
from phage_opt._verify import max_deviation
from phage_opt._verify import MAX_SIM_WIRES
from phage_opt._verify import simulate_cldcl_postselected
from phage_opt._verify import simulate_unitary
from phage_opt._verify import TOLERANCE

REPORT_VERSION = 1


class Options(NamedTuple):
    passes: int = 1
    family: str = '63'
    skip_stomp5: bool = False
    post_pass: str | None = None
    verify: bool = False
    max_sim_wires: int = MAX_SIM_WIRES

    @property
    def families(self) -> tuple[str, ...]:
        if self.skip_stomp5:
            return ('stomp4',)
        elif self.family == '58':
            return ('stomp4', 'stomp5-58')
        else:
            return ('stomp4', 'stomp5')


class RunReport(NamedTuple):
    circuit_name: str
    wire_count: int
    extra_qubits: int
    t_count_initial: int
    t_after_fusion: int
    t_after_stomp: int
    t_after_post_pass: int | None
    wall_times: dict[str, float]
    stomp: list[dict[str, Any]]
    verified: bool | None = None
    max_deviation: float | None = None

    def to_json(self) -> dict[str, Any]:
        ret: dict[str, Any] = {
            'version': REPORT_VERSION,
            'circuit': self.circuit_name,
            'wireCount': self.wire_count,
            'extraQubits': self.extra_qubits,
            'tCountInitial': self.t_count_initial,
            'tAfterFusion': self.t_after_fusion,
            'tAfterStomp': self.t_after_stomp,
            'tAfterPostPass': self.t_after_post_pass,
            'wallTimes': self.wall_times,
            'stomp': self.stomp,
        }
        if self.verified is not None:
            ret['verify'] = {
                'result': 'PASS' if self.verified else 'FAIL',
                'maxDeviation': self.max_deviation,
            }
        return ret


def post_pass(body: PhasePolynomial, cmd: str) -> PhasePolynomial:
    """Pipe `body` through an external optimiser speaking the text format."""
    try:
        proc = subprocess.run(
            shlex.split(cmd),
            input=format_poly(body),
            capture_output=True,
            text=True,
            check=False,
        )
    except OSError as e:
        raise PostPassError(f'could not run {cmd!r}: {e}')
    if proc.returncode:
        raise PostPassError(
            f'{cmd!r} exited {proc.returncode}: {proc.stderr.strip()}',
        )
    try:
        ret = parse_poly(proc.stdout, body.width)
    except ValueError as e:
        raise PostPassError(f'{cmd!r} produced an unreadable polynomial: {e}')
    if not equivalent(ret, body):
        raise PostPassError(f'{cmd!r} changed the diagonal unitary')
    return ret


def run_pipeline(
        c: Circuit,
        options: Options = Options(),
        name: str = '',
) -> tuple[ClDClForm, RunReport]:
    times = {}

    start = time.perf_counter()
    form = to_cldcl(c)
    times['cldcl'] = time.perf_counter() - start
    fused = form.t_count

    start = time.perf_counter()
    stomp_stats: list[dict[str, Any]] = []
    body = run_strategy(
        form.body,
        options.passes,
        families=options.families,
        stats=stomp_stats,
    )
    times['stomp'] = time.perf_counter() - start
    if t_count(body) > fused:
        raise AssertionError('STOMP increased the T-count')
    form = form._replace(body=body)
    after_stomp = form.t_count

    after_post_pass = None
    if options.post_pass is not None:
        start = time.perf_counter()
        candidate = post_pass(body, options.post_pass)
        times['postPass'] = time.perf_counter() - start
        if t_count(candidate) < after_stomp:
            form = form._replace(body=candidate)
        after_post_pass = form.t_count

    verified = deviation = None
    if options.verify and form.width <= options.max_sim_wires:
        start = time.perf_counter()
        expected = simulate_unitary(expand_multi_controls(c), options.max_sim_wires)
        actual = simulate_cldcl_postselected(form, options.max_sim_wires)
        deviation = max_deviation(actual, expected)
        verified = deviation <= TOLERANCE
        times['verify'] = time.perf_counter() - start

    report = RunReport(
        circuit_name=name,
        wire_count=c.wire_count,
        extra_qubits=form.extra_qubits,
        t_count_initial=t_count_of(c),
        t_after_fusion=fused,
        t_after_stomp=after_stomp,
        t_after_post_pass=after_post_pass,
        wall_times=times,
        stomp=stomp_stats,
        verified=verified,
        max_deviation=deviation,
    )
    return form, report


def _unpermute(wire_map: tuple[int, ...]) -> list[Gate]:
    """SWAPs moving logical wire w from wire_map[w] back onto wire w."""
    where = list(wire_map)
    swaps = []
    for w, physical in enumerate(where):
        if physical == w:
            continue
        swaps.append(Gate('SWAP', (w, physical)))
        for u in range(w + 1, len(where)):
            if where[u] == w:
                where[u] = physical
        where[w] = w
    return swaps


def emit_circuit(f: ClDClForm) -> Circuit:
    """The form as one gate list, ancillas prepared with H from |0>.

    Measurements cannot be expressed as gates; `emit_qc` adds them as
    structured comments in front of the final layer.
    """
    gates = [
        *f.initial,
        *(Gate('H', (a,)) for a in f.preps),
        *resynthesize(f.body, f.wires).gates,
        *f.linear,
        *f.final,
        *_unpermute(f.wire_map),
    ]
    return Circuit(f.wires, tuple(gates), f.inputs, f.outputs)


def emit_qc(f: ClDClForm) -> str:
    c = emit_circuit(f)
    notes = []
    for e, (label, corrections) in zip(f.measurements, correction_layers(f)):
        notes.append(f'measure {f.wires[e.wire]} {e.basis} -> {label}')
        notes.extend(
            f'if {label}: {format_gate(g, f.wires)}' for g in corrections
        )
    before_final = len(c.gates) - len(f.final) - len(_unpermute(f.wire_map))
    return write_qc(c, annotations={before_final: notes})
