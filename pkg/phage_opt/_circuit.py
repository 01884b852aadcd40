from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Sequence
from typing import NamedTuple

# kind -> number of wires, None for the variable-arity MCNOT
ARITY = {
    'X': 1,
    'Z': 1,
    'S': 1,
    'Sdg': 1,
    'T': 1,
    'Tdg': 1,
    'H': 1,
    'CNOT': 2,
    'CZ': 2,
    'SWAP': 2,
    'CCNOT': 3,
    'CCZ': 3,
    'MCNOT': None,
}
CLIFFORD = frozenset(('X', 'Z', 'S', 'Sdg', 'H', 'CNOT', 'CZ', 'SWAP'))
DIAGONAL = frozenset(('Z', 'S', 'Sdg', 'T', 'Tdg', 'CZ', 'CCZ'))
LINEAR = frozenset(('X', 'CNOT', 'SWAP'))


class Gate(NamedTuple):
    kind: str
    wires: tuple[int, ...]

    @property
    def target(self) -> int:
        return self.wires[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.wires[:-1]


class Circuit(NamedTuple):
    wires: tuple[str, ...]
    gates: tuple[Gate, ...]
    inputs: tuple[int, ...] | None = None
    outputs: tuple[int, ...] | None = None

    @property
    def wire_count(self) -> int:
        return len(self.wires)


def gate(kind: str, *wires: int) -> Gate:
    try:
        arity = ARITY[kind]
    except KeyError:
        raise ValueError(f'unknown gate kind {kind!r}')
    if arity is None:
        if len(wires) < 4:
            raise ValueError(f'{kind} needs at least 3 controls')
    elif len(wires) != arity:
        raise ValueError(f'{kind} takes {arity} wire(s), got {len(wires)}')
    if len(set(wires)) != len(wires):
        raise ValueError(f'{kind} wires must be distinct: {wires}')
    return Gate(kind, tuple(wires))


def circuit_from_gates(
        names: Sequence[str] | int,
        gates: Iterable[tuple[str, Sequence[int]] | Gate],
) -> Circuit:
    if isinstance(names, int):
        names = tuple(f'q{i}' for i in range(names))
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValueError(f'duplicate wire names: {names}')

    ret = []
    for kind, wires in gates:
        g = gate(kind, *wires)
        if any(not 0 <= w < len(names) for w in g.wires):
            raise ValueError(f'{kind} references a wire outside {names}')
        ret.append(g)
    return Circuit(names, tuple(ret))


def t_count_of(c: Circuit) -> int:
    ret = 0
    for g in c.gates:
        if g.kind in {'T', 'Tdg'}:
            ret += 1
        elif g.kind in {'CCNOT', 'CCZ'}:
            ret += 7
        elif g.kind == 'MCNOT':
            ret += 7 * (2 * (len(g.wires) - 3) + 1)
    return ret


def _ladder(controls: tuple[int, ...], target: int, ancillas: list[int]) -> list[Gate]:
    k = len(controls)
    compute = [Gate('CCNOT', (controls[0], controls[1], ancillas[0]))]
    for i in range(2, k - 1):
        compute.append(
            Gate('CCNOT', (controls[i], ancillas[i - 2], ancillas[i - 1])),
        )
    apply = Gate('CCNOT', (controls[-1], ancillas[k - 3], target))
    return [*compute, apply, *reversed(compute)]


def expand_multi_controls(c: Circuit) -> Circuit:
    """Rewrite every MCNOT as a Toffoli ladder through clean ancillas.

    The ancilla pool is appended after the existing wires and shared by all
    MCNOTs of the circuit; each ladder returns its ancillas to |0>.
    """
    needed = max(
        (len(g.wires) - 3 for g in c.gates if g.kind == 'MCNOT'),
        default=0,
    )
    if not needed:
        return c

    ancillas = list(range(len(c.wires), len(c.wires) + needed))
    gates: list[Gate] = []
    for g in c.gates:
        if g.kind == 'MCNOT':
            gates.extend(_ladder(g.controls, g.target, ancillas))
        else:
            gates.append(g)

    names = c.wires + tuple(f'_anc{k}' for k in range(needed))
    return c._replace(wires=names, gates=tuple(gates))
