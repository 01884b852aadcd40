from __future__ import annotations

from collections.abc import Mapping
from collections.abc import Sequence

from phage_opt._circuit import Circuit
from phage_opt._circuit import Gate
from phage_opt._errors import QcSyntaxError

# mnemonic -> {arity: kind}; an arity of 0 matches any count >= 4
_MNEMONICS = {
    'H': {1: 'H'},
    'X': {1: 'X'},
    'Z': {1: 'Z', 2: 'CZ', 3: 'CCZ'},
    'Zd': {1: 'Z', 2: 'CZ', 3: 'CCZ'},
    'S': {1: 'S'},
    'P': {1: 'S'},
    'S*': {1: 'Sdg'},
    'P*': {1: 'Sdg'},
    'T': {1: 'T'},
    'T*': {1: 'Tdg'},
    'tof': {1: 'X', 2: 'CNOT', 3: 'CCNOT', 0: 'MCNOT'},
    'Tof': {1: 'X', 2: 'CNOT', 3: 'CCNOT', 0: 'MCNOT'},
    'cnot': {2: 'CNOT'},
    'swap': {2: 'SWAP'},
}
_SPELLING = {
    'H': 'H',
    'X': 'X',
    'Z': 'Z',
    'S': 'S',
    'Sdg': 'S*',
    'T': 'T',
    'Tdg': 'T*',
    'CNOT': 'tof',
    'CCNOT': 'tof',
    'MCNOT': 'tof',
    'CZ': 'Z',
    'CCZ': 'Z',
    'SWAP': 'swap',
}


def _lookup(
        mnemonic: str,
        args: list[str],
        names: dict[str, int],
        lineno: int,
) -> Gate:
    try:
        kinds = _MNEMONICS[mnemonic]
    except KeyError:
        raise QcSyntaxError(f'unknown gate {mnemonic!r}', lineno)

    if len(args) in kinds:
        kind = kinds[len(args)]
    elif len(args) >= 4 and 0 in kinds:
        kind = kinds[0]
    else:
        raise QcSyntaxError(
            f'{mnemonic} does not take {len(args)} argument(s)', lineno,
        )

    wires = []
    for arg in args:
        try:
            wires.append(names[arg])
        except KeyError:
            raise QcSyntaxError(f'undeclared wire {arg!r}', lineno)
    if len(set(wires)) != len(wires):
        raise QcSyntaxError(f'repeated wire in {mnemonic} {" ".join(args)}', lineno)
    return Gate(kind, tuple(wires))


def _subset(
        args: list[str],
        names: dict[str, int],
        lineno: int,
) -> tuple[int, ...]:
    try:
        return tuple(names[arg] for arg in args)
    except KeyError as e:
        raise QcSyntaxError(f'undeclared wire {e.args[0]!r}', lineno)


def parse_qc(text: str) -> Circuit:
    names: dict[str, int] | None = None
    inputs: tuple[int, ...] | None = None
    outputs: tuple[int, ...] | None = None
    gates: list[Gate] = []
    in_body = done = False

    for lineno, line in enumerate(text.splitlines(), start=1):
        line, _, _ = line.partition('#')
        parts = line.split()
        if not parts:
            continue

        head, args = parts[0], parts[1:]
        if done:
            raise QcSyntaxError(f'unexpected {head!r} after END', lineno)
        elif in_body:
            if head == 'END':
                done = True
            else:
                assert names is not None
                gates.append(_lookup(head, args, names, lineno))
        elif head == '.v':
            if len(set(args)) != len(args):
                raise QcSyntaxError('duplicate wire in .v', lineno)
            names = {name: i for i, name in enumerate(args)}
        elif head in {'.i', '.o'}:
            if names is None:
                raise QcSyntaxError(f'{head} before .v', lineno)
            if head == '.i':
                inputs = _subset(args, names, lineno)
            else:
                outputs = _subset(args, names, lineno)
        elif head == 'BEGIN':
            if names is None:
                raise QcSyntaxError('BEGIN before .v', lineno)
            in_body = True
        elif head.startswith('.'):
            continue  # other headers (.c constants, ...) carry no semantics
        else:
            raise QcSyntaxError(f'unexpected {head!r} outside BEGIN/END', lineno)

    if names is None:
        raise QcSyntaxError('missing .v declaration', 1)
    elif not done:
        raise QcSyntaxError('missing END', len(text.splitlines()))

    return Circuit(tuple(names), tuple(gates), inputs, outputs)


def format_gate(g: Gate, wires: Sequence[str]) -> str:
    return ' '.join((_SPELLING[g.kind], *(wires[w] for w in g.wires)))


def write_qc(
        c: Circuit,
        *,
        annotations: Mapping[int, Sequence[str]] | None = None,
) -> str:
    """Render `c` in the `.qc` dialect.

    `annotations` maps a gate index to comment lines emitted just before
    that gate; the index `len(c.gates)` places comments before `END`.
    """
    annotations = annotations or {}
    lines = [' '.join(('.v', *c.wires))]
    if c.inputs is not None:
        lines.append(' '.join(('.i', *(c.wires[w] for w in c.inputs))))
    if c.outputs is not None:
        lines.append(' '.join(('.o', *(c.wires[w] for w in c.outputs))))
    lines.extend(('', 'BEGIN'))
    for i, g in enumerate(c.gates):
        lines.extend(f'# {s}' for s in annotations.get(i, ()))
        lines.append(format_gate(g, c.wires))
    lines.extend(f'# {s}' for s in annotations.get(len(c.gates), ()))
    lines.append('END')
    return '\n'.join(lines) + '\n'
