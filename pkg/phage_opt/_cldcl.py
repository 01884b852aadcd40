from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Sequence
from typing import Any
from typing import NamedTuple

from phage_opt._circuit import Circuit
from phage_opt._circuit import CLIFFORD
from phage_opt._circuit import DIAGONAL
from phage_opt._circuit import expand_multi_controls
from phage_opt._circuit import Gate
from phage_opt._circuit import LINEAR
from phage_opt._phase_poly import from_terms
from phage_opt._phase_poly import mask
from phage_opt._phase_poly import members
from phage_opt._phase_poly import ParityFrame
from phage_opt._phase_poly import PhaseGadget
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._phase_poly import t_count

_SELF_INVERSE = frozenset(('H', 'X', 'Z', 'CZ', 'CNOT'))


class MeasurementEvent(NamedTuple):
    wire: int
    label: str
    corrections: tuple[Gate, ...]
    basis: str = 'X'


class Stages(NamedTuple):
    wires: tuple[str, ...]
    initial: tuple[Gate, ...]
    body: tuple[Gate, ...]
    final: tuple[Gate, ...]
    wire_map: tuple[int, ...]


class Gadgetized(NamedTuple):
    wires: tuple[str, ...]
    n_inputs: int
    initial: tuple[Gate, ...]
    preps: tuple[int, ...]
    body: tuple[Gate, ...]
    measurements: tuple[MeasurementEvent, ...]
    final: tuple[Gate, ...]
    wire_map: tuple[int, ...]


class ClDClForm(NamedTuple):
    """initial -> |+> preps -> body -> linear -> measurements -> final.

    Wires `n_inputs` and up are ancillas; logical output w ends up on
    physical wire `wire_map[w]`.  `inputs` and `outputs` are the declared
    wires of the source circuit.
    """
    wires: tuple[str, ...]
    n_inputs: int
    n_original: int
    initial: tuple[Gate, ...]
    preps: tuple[int, ...]
    body: PhasePolynomial
    linear: tuple[Gate, ...]
    measurements: tuple[MeasurementEvent, ...]
    final: tuple[Gate, ...]
    wire_map: tuple[int, ...]
    inputs: tuple[int, ...] | None = None
    outputs: tuple[int, ...] | None = None

    @property
    def width(self) -> int:
        return len(self.wires)

    @property
    def extra_qubits(self) -> int:
        return self.width - self.n_original

    @property
    def t_count(self) -> int:
        return t_count(self.body)


def _resolve_swaps(c: Circuit) -> tuple[list[Gate], tuple[int, ...]]:
    physical = list(range(c.wire_count))
    gates = []
    for g in c.gates:
        if g.kind == 'SWAP':
            a, b = g.wires
            physical[a], physical[b] = physical[b], physical[a]
        else:
            gates.append(g._replace(wires=tuple(physical[w] for w in g.wires)))
    return gates, tuple(physical)


def _to_phase_gates(g: Gate) -> list[Gate]:
    if g.kind == 'MCNOT':
        raise ValueError('expand multiply-controlled NOTs before normalizing')
    elif g.kind in {'X', 'CNOT', 'CCNOT'}:
        h = Gate('H', (g.target,))
        kind = {'X': 'Z', 'CNOT': 'CZ', 'CCNOT': 'CCZ'}[g.kind]
        return [h, Gate(kind, g.wires), h]
    else:
        return [g]


def _same_gate(a: Gate, b: Gate) -> bool:
    if a.kind != b.kind:
        return False
    elif a.kind == 'CZ':
        return set(a.wires) == set(b.wires)
    else:
        return a.wires == b.wires


def _cancel_pairs(gates: Iterable[Gate]) -> list[Gate]:
    out: list[Gate | None] = []
    stacks: dict[int, list[int]] = {}
    for g in gates:
        if g.kind in _SELF_INVERSE:
            tops = {(stacks.get(w) or [-1])[-1] for w in g.wires}
            if len(tops) == 1:
                top, = tops
                prev = out[top] if top >= 0 else None
                if prev is not None and _same_gate(prev, g):
                    out[top] = None
                    for w in g.wires:
                        stacks[w].pop()
                    continue
        for w in g.wires:
            stacks.setdefault(w, []).append(len(out))
        out.append(g)
    return [g for g in out if g is not None]


def _hoist_left(gates: Iterable[Gate]) -> tuple[list[Gate], list[Gate]]:
    touched: set[int] = set()
    non_diagonal: set[int] = set()
    moved, kept = [], []
    for g in gates:
        if g.kind in CLIFFORD:
            blocking = non_diagonal if g.kind in DIAGONAL else touched
            if blocking.isdisjoint(g.wires):
                moved.append(g)
                continue
        kept.append(g)
        touched.update(g.wires)
        if g.kind not in DIAGONAL:
            non_diagonal.update(g.wires)
    return moved, kept


def _hoist(gates: list[Gate]) -> tuple[list[Gate], list[Gate], list[Gate]]:
    initial, body = _hoist_left(gates)
    final, body = _hoist_left(reversed(body))
    return initial, body[::-1], final[::-1]


def _through_hadamard(g: Gate, q: int) -> Gate | None:
    """H_q g H_q, when it is again one of the gates we can track."""
    if g.kind == 'X':
        return Gate('Z', g.wires)
    elif g.kind == 'Z':
        return Gate('X', g.wires)
    elif g.kind == 'CZ':
        other, = (w for w in g.wires if w != q)
        return Gate('CNOT', (other, q))
    elif g.kind == 'CNOT' and g.target == q:
        return Gate('CZ', g.wires)
    else:
        return None


def _walk(
        body: list[Gate],
        i: int,
        step: int,
) -> tuple[dict[int, Gate], int | None] | None:
    q = body[i].wires[0]
    changed = {}
    j = i + step
    while 0 <= j < len(body):
        g = body[j]
        if q in g.wires:
            if g.kind == 'H':
                return changed, j
            replacement = _through_hadamard(g, q)
            if replacement is None:
                return None
            changed[j] = replacement
        j += step
    return changed, None


def _commute_hadamards(
        gates: list[Gate],
) -> tuple[list[Gate], list[Gate], list[Gate]]:
    body = list(gates)
    to_initial: list[Gate] = []
    to_final: list[Gate] = []
    i = 0
    while i < len(body):
        if body[i].kind != 'H':
            i += 1
            continue

        # try the nearer end first
        walk = None
        for step in (-1, 1) if i <= len(body) - 1 - i else (1, -1):
            walk = _walk(body, i, step)
            if walk is not None:
                break
        if walk is None:
            i += 1
            continue

        changed, partner = walk
        h = body[i]
        for j, g in changed.items():
            body[j] = g
        if partner is None:
            (to_initial if step < 0 else to_final).append(h)
            del body[i]
        else:
            for j in sorted((i, partner), reverse=True):
                del body[j]
            i = min(i, partner)
    return to_initial, body, to_final[::-1]


def normalize_gates(c: Circuit) -> Stages:
    """Rewrite `c` as Clifford layers around a body of phases and Hadamards.

    X/CNOT/CCNOT become Hadamard-conjugated Z/CZ/CCZ, SWAPs become a wire
    relabelling, and every Hadamard that can be cancelled or commuted out
    of the body is.
    """
    gates, wire_map = _resolve_swaps(c)
    gates = [h for g in gates for h in _to_phase_gates(g)]

    initial, body, final = _hoist(_cancel_pairs(gates))
    to_initial, body, to_final = _commute_hadamards(body)
    more_initial, body, more_final = _hoist(_cancel_pairs(body))

    return Stages(
        wires=c.wires,
        initial=(*initial, *to_initial, *more_initial),
        body=tuple(body),
        final=(*more_final, *to_final, *final),
        wire_map=wire_map,
    )


def _reroute(g: Gate, old: int, new: int) -> Gate:
    return g._replace(wires=tuple(new if w == old else w for w in g.wires))


def start_gadgetizing(stages: Stages) -> Gadgetized:
    return Gadgetized(
        wires=stages.wires,
        n_inputs=len(stages.wires),
        initial=stages.initial,
        preps=(),
        body=stages.body,
        measurements=(),
        final=stages.final,
        wire_map=stages.wire_map,
    )


def gadgetize_hadamard(g: Gadgetized, position: int) -> Gadgetized:
    """Replace the body Hadamard at `position` by a |+> ancilla gadget.

    The old wire is measured in the X basis; everything after the gadget
    that used it continues on the ancilla.
    """
    h = g.body[position]
    if h.kind != 'H':
        raise ValueError(f'no Hadamard at body position {position}')
    q, = h.wires
    a = len(g.wires)
    event = MeasurementEvent(
        wire=q,
        label=f's{len(g.measurements)}',
        corrections=(Gate('X', (a,)),),
    )
    return g._replace(
        wires=(*g.wires, f'_h{len(g.preps)}'),
        preps=(*g.preps, a),
        body=(
            *g.body[:position],
            Gate('CZ', (q, a)),
            *(_reroute(x, q, a) for x in g.body[position + 1:]),
        ),
        measurements=(*g.measurements, event),
        final=tuple(_reroute(x, q, a) for x in g.final),
        wire_map=tuple(a if w == q else w for w in g.wire_map),
    )


def gadgetize(stages: Stages) -> Gadgetized:
    ret = start_gadgetizing(stages)
    for position, g in enumerate(stages.body):
        if g.kind == 'H':
            ret = gadgetize_hadamard(ret, position)
    return ret


def diagonalize(g: Gadgetized) -> ClDClForm:
    frame = ParityFrame(len(g.wires))
    gadgets: list[PhaseGadget] = []
    linear = []
    for gate in g.body:
        if gate.kind in LINEAR:
            frame.push(gate)
            linear.append(gate)
        elif gate.kind in DIAGONAL:
            gadgets.extend(frame.gadgets(gate))
        else:
            raise AssertionError(f'{gate.kind} left in the main body')

    return ClDClForm(
        wires=g.wires,
        n_inputs=g.n_inputs,
        n_original=g.n_inputs,
        initial=g.initial,
        preps=g.preps,
        body=from_terms(len(g.wires), gadgets),
        linear=tuple(linear),
        measurements=g.measurements,
        final=g.final,
        wire_map=g.wire_map,
    )


def canonicalize(f: ClDClForm) -> ClDClForm:
    body = from_terms(f.width, f.body.terms)
    if t_count(body) > t_count(f.body):
        raise AssertionError('canonicalization increased the T-count')
    events = sorted(f.measurements, key=lambda e: int(e.label[1:]))
    return f._replace(body=body, measurements=tuple(events))


def correction_layers(f: ClDClForm) -> tuple[tuple[str, tuple[Gate, ...]], ...]:
    return tuple((e.label, e.corrections) for e in f.measurements)


def to_cldcl(c: Circuit) -> ClDClForm:
    stages = normalize_gates(expand_multi_controls(c))
    interior = sum(g.kind == 'H' for g in stages.body)
    form = canonicalize(diagonalize(gadgetize(stages)))
    if len(form.preps) != interior:
        raise AssertionError('one ancilla per interior Hadamard')
    return form._replace(
        n_original=c.wire_count, inputs=c.inputs, outputs=c.outputs,
    )


def form_stats(f: ClDClForm) -> dict[str, int]:
    return {
        'width': f.width,
        'extraQubits': f.extra_qubits,
        'tCountAfterFusion': f.t_count,
    }


def _gates_to_json(gates: Sequence[Gate]) -> list[list[Any]]:
    return [[g.kind, list(g.wires)] for g in gates]


def _gates_from_json(obj: Sequence[Sequence[Any]]) -> tuple[Gate, ...]:
    return tuple(Gate(kind, tuple(wires)) for kind, wires in obj)


def _optional_list(wires: tuple[int, ...] | None) -> list[int] | None:
    return None if wires is None else list(wires)


def _optional_tuple(wires: Sequence[int] | None) -> tuple[int, ...] | None:
    return None if wires is None else tuple(wires)


def form_to_json(f: ClDClForm) -> dict[str, Any]:
    return {
        'width': f.width,
        'wires': list(f.wires),
        'nInputs': f.n_inputs,
        'nOriginal': f.n_original,
        'initial': _gates_to_json(f.initial),
        'preps': list(f.preps),
        'body': [
            [f.body.terms[s], list(members(s))]
            for s in sorted(f.body.terms, key=members)
        ],
        'linear': _gates_to_json(f.linear),
        'measurements': [
            {
                'wire': e.wire,
                'basis': e.basis,
                'label': e.label,
                'corrections': _gates_to_json(e.corrections),
            }
            for e in f.measurements
        ],
        'final': _gates_to_json(f.final),
        'wireMap': list(f.wire_map),
        'inputs': _optional_list(f.inputs),
        'outputs': _optional_list(f.outputs),
    }


def form_from_json(obj: dict[str, Any]) -> ClDClForm:
    wires = tuple(obj['wires'])
    if obj['width'] != len(wires):
        raise ValueError(f'width {obj["width"]} != {len(wires)} wires')
    return ClDClForm(
        wires=wires,
        n_inputs=obj['nInputs'],
        n_original=obj['nOriginal'],
        initial=_gates_from_json(obj['initial']),
        preps=tuple(obj['preps']),
        body=from_terms(len(wires), ((mask(ws), c) for c, ws in obj['body'])),
        linear=_gates_from_json(obj['linear']),
        measurements=tuple(
            MeasurementEvent(
                wire=e['wire'],
                label=e['label'],
                corrections=_gates_from_json(e['corrections']),
                basis=e['basis'],
            )
            for e in obj['measurements']
        ),
        final=_gates_from_json(obj['final']),
        wire_map=tuple(obj['wireMap']),
        inputs=_optional_tuple(obj.get('inputs')),
        outputs=_optional_tuple(obj.get('outputs')),
    )
