from __future__ import annotations

import collections
import itertools
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from phage_opt._circuit import Circuit
from phage_opt._circuit import DIAGONAL
from phage_opt._circuit import Gate
from phage_opt._circuit import LINEAR
from phage_opt._errors import WidthMismatch

# widest phase table we are willing to materialise
MAX_TABLE_WIDTH = 24


class PhaseGadget(NamedTuple):
    parity: int
    coeff: int


class PhasePolynomial(NamedTuple):
    """Diagonal unitary |z> -> exp(i*pi/4 * sum c_S <S, z>) |z>.

    `terms` maps a parity set (bit w set for wire w) to its coefficient in
    Z8; zero coefficients are never stored.
    """
    width: int
    terms: Mapping[int, int]


class PhaseFunction(NamedTuple):
    width: int
    values: tuple[int, ...]


def mask(wires: Iterable[int]) -> int:
    ret = 0
    for w in wires:
        ret |= 1 << w
    return ret


def members(parity: int) -> tuple[int, ...]:
    ret = []
    w = 0
    while parity:
        if parity & 1:
            ret.append(w)
        parity >>= 1
        w += 1
    return tuple(ret)


def popcount(x: int) -> int:
    return bin(x).count('1')


def _check(width: int, parity: int) -> None:
    if parity <= 0 or parity >> width:
        raise WidthMismatch(
            f'parity set {members(parity)} does not fit width {width}',
        )


def from_terms(
        width: int,
        terms: Mapping[int, int] | Iterable[tuple[int, int]],
) -> PhasePolynomial:
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict[int, int] = {}
    for parity, coeff in items:
        _check(width, parity)
        acc[parity] = (acc.get(parity, 0) + coeff) % 8
    return PhasePolynomial(width, {s: c for s, c in acc.items() if c})


def empty(width: int) -> PhasePolynomial:
    return PhasePolynomial(width, {})


def fuse_insert(p: PhasePolynomial, g: PhaseGadget) -> PhasePolynomial:
    _check(p.width, g.parity)
    terms = dict(p.terms)
    coeff = (terms.get(g.parity, 0) + g.coeff) % 8
    if coeff:
        terms[g.parity] = coeff
    else:
        terms.pop(g.parity, None)
    return PhasePolynomial(p.width, terms)


def fuse(p: PhasePolynomial, q: PhasePolynomial) -> PhasePolynomial:
    if p.width != q.width:
        raise WidthMismatch(f'cannot fuse width {p.width} with {q.width}')
    return from_terms(
        p.width, itertools.chain(p.terms.items(), q.terms.items()),
    )


def negate(p: PhasePolynomial) -> PhasePolynomial:
    return PhasePolynomial(p.width, {s: -c % 8 for s, c in p.terms.items()})


def t_count(p: PhasePolynomial) -> int:
    return sum(c & 1 for c in p.terms.values())


def odd_terms(p: PhasePolynomial) -> frozenset[int]:
    return frozenset(s for s, c in p.terms.items() if c & 1)


def relabel(
        p: PhasePolynomial,
        wires: Sequence[int],
        width: int,
) -> PhasePolynomial:
    """Move local wire i of `p` onto wire `wires[i]` of a `width`-wire poly."""
    return from_terms(
        width,
        ((mask(wires[w] for w in members(s)), c) for s, c in p.terms.items()),
    )


def conjugate_x(p: PhasePolynomial, q: int) -> PhasePolynomial:
    bit = 1 << q
    return PhasePolynomial(
        p.width,
        {s: -c % 8 if s & bit else c for s, c in p.terms.items()},
    )


def conjugate_cnot(p: PhasePolynomial, h: int, j: int) -> PhasePolynomial:
    if h == j:
        raise ValueError('CNOT control and target must differ')
    h_bit, j_bit = 1 << h, 1 << j
    return from_terms(
        p.width,
        ((s ^ h_bit if s & j_bit else s, c) for s, c in p.terms.items()),
    )


def parity_phase(
        parity: int,
        k: int,
        width: int,
        *,
        inverse: bool = False,
) -> PhasePolynomial:
    if k > 3:
        raise ValueError(f'parity phase of order {k} needs more than Z8')
    coeff = 2 ** (3 - k) % 8 if k > 0 else 0
    return from_terms(width, ((parity, -coeff if inverse else coeff),))


def decompose_controlled_phase(
        wires: Sequence[int],
        k: int,
        width: int | None = None,
) -> PhasePolynomial:
    """Phase exp(i*pi * 2**(len(wires) - k)) on the all-ones state of `wires`."""
    if k > 3:
        raise ValueError(f'controlled phase of order {k} needs more than Z8')
    if len(set(wires)) != len(wires):
        raise ValueError(f'wires must be distinct: {wires}')
    if width is None:
        width = max(wires) + 1
    scale = 2 ** (3 - k) % 8 if k > 0 else 0
    terms = []
    for r in range(1, len(wires) + 1):
        coeff = scale if r % 2 else -scale
        terms.extend((mask(sub), coeff) for sub in itertools.combinations(wires, r))
    return from_terms(width, terms)


def decompose_cs(h: int, j: int, width: int | None = None) -> PhasePolynomial:
    return decompose_controlled_phase((h, j), 3, width)


def decompose_ccz(
        g: int,
        h: int,
        j: int,
        width: int | None = None,
) -> PhasePolynomial:
    return decompose_controlled_phase((g, h, j), 3, width)


# diagonal gate -> (order of the controlled phase, inverse?)
_GATE_PHASES = {
    'Z': (1, False),
    'S': (2, False),
    'Sdg': (2, True),
    'T': (3, False),
    'Tdg': (3, True),
    'CZ': (2, False),
    'CCZ': (3, False),
}


def gate_polynomial(g: Gate, width: int) -> PhasePolynomial:
    k, inverse = _GATE_PHASES[g.kind]
    ret = decompose_controlled_phase(g.wires, k, width)
    return negate(ret) if inverse else ret


def _basis(p: PhasePolynomial, z: int | str) -> int:
    if isinstance(z, str):
        if len(z) != p.width or set(z) - {'0', '1'}:
            raise WidthMismatch(f'{z!r} is not a {p.width}-bit basis state')
        return mask(i for i, ch in enumerate(z) if ch == '1')
    elif z >> p.width:
        raise WidthMismatch(f'basis state {z} does not fit width {p.width}')
    return z


def eval_on_basis(p: PhasePolynomial, z: int | str) -> int:
    """Phase exponent (units of pi/4) on |z>; a string gives wire 0 first."""
    z = _basis(p, z)
    return sum(c * (popcount(s & z) & 1) for s, c in p.terms.items()) % 8


def phase_table(p: PhasePolynomial) -> np.ndarray:
    """Integer phase exponents for every z, indexed with bit w = wire w."""
    if p.width > MAX_TABLE_WIDTH:
        raise ValueError(f'phase table of width {p.width} is too large')
    z = np.arange(1 << p.width, dtype=np.int64)
    ret = np.zeros_like(z)
    for s, c in p.terms.items():
        parity = np.zeros_like(z)
        for w in members(s):
            parity ^= (z >> w) & 1
        ret += c * parity
    return ret


def phase_function(p: PhasePolynomial) -> PhaseFunction:
    return PhaseFunction(p.width, tuple(int(v) for v in phase_table(p)))


def _fwht(a: np.ndarray) -> np.ndarray:
    n = len(a)
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1)
        a = a.reshape(n)
        h *= 2
    return a


def _and_coefficients(values: np.ndarray, width: int) -> np.ndarray:
    # f(z) = sum over T of a_T * prod_{w in T} z_w  (mod 8)
    a = values % 8
    for w in range(width):
        a = a.reshape(-1, 2, 1 << w)
        a[:, 1] -= a[:, 0]
        a = a.reshape(-1)
    return a % 8


def walsh_coefficients(f: PhaseFunction) -> tuple[PhasePolynomial, int]:
    """Parity expansion of a phase function.

    Returns the polynomial and the constant (global phase) exponent.  Values
    whose Walsh spectrum divides exactly (such as `phase_function`) expand
    term for term; anything else is read mod 8.
    """
    if len(f.values) != 1 << f.width:
        raise ValueError(f'expected {1 << f.width} values, got {len(f.values)}')
    if f.width == 0:
        return empty(0), f.values[0] % 8

    values = np.array(f.values, dtype=np.int64)
    spectrum = _fwht(values)
    scale = 1 << (f.width - 1)
    if not np.any(spectrum[1:] % scale):
        coeffs = (-spectrum // scale) % 8
        terms = {s: int(c) for s, c in enumerate(coeffs) if s and c}
        return PhasePolynomial(f.width, terms), f.values[0] % 8

    # 2**(r-1) * prod_T z == sum over nonempty U in T of (-1)**(|U|-1) <U, z>
    gadgets: list[tuple[int, int]] = []
    for t, a in enumerate(_and_coefficients(values, f.width)):
        if not t or not a:
            continue
        ws = members(t)
        if len(ws) > 3 or a % (1 << (len(ws) - 1)):
            raise ValueError('not a sum of pi/4 parity phases')
        k = int(a) >> (len(ws) - 1)
        for r in range(1, len(ws) + 1):
            for sub in itertools.combinations(ws, r):
                gadgets.append((mask(sub), k if r % 2 else -k))
    return from_terms(f.width, gadgets), f.values[0] % 8


def _monomials(p: PhasePolynomial) -> dict[int, int]:
    # <S, z> = sum over nonempty T in S of (-2)**(|T| - 1) * prod_{T} z
    ret: dict[int, int] = collections.defaultdict(int)
    for s, c in p.terms.items():
        ws = members(s)
        for r in range(1, min(3, len(ws)) + 1):
            weight = c * (-2) ** (r - 1)
            for sub in itertools.combinations(ws, r):
                ret[mask(sub)] += weight
    return {t: v % 8 for t, v in ret.items() if v % 8}


def equivalent(p: PhasePolynomial, q: PhasePolynomial) -> bool:
    """Whether `p` and `q` denote the same unitary up to global phase."""
    if p.width != q.width:
        raise WidthMismatch(f'cannot compare width {p.width} with {q.width}')
    return not _monomials(fuse(p, negate(q)))


class ParityFrame:
    """Affine tracking of CNOT/X/SWAP through a circuit.

    Wire w carries the parity `parities[w]` of the frame's input variables,
    XORed with `flips[w]`.
    """

    def __init__(self, width: int) -> None:
        self.parities = [1 << w for w in range(width)]
        self.flips = [0] * width

    def push(self, g: Gate) -> None:
        if g.kind == 'X':
            self.flips[g.wires[0]] ^= 1
        elif g.kind == 'CNOT':
            c, t = g.wires
            self.parities[t] ^= self.parities[c]
            self.flips[t] ^= self.flips[c]
        elif g.kind == 'SWAP':
            a, b = g.wires
            self.parities[a], self.parities[b] = self.parities[b], self.parities[a]
            self.flips[a], self.flips[b] = self.flips[b], self.flips[a]
        else:
            raise AssertionError(f'{g.kind} is not a linear gate')

    def gadgets(self, g: Gate) -> Iterator[PhaseGadget]:
        local = gate_polynomial(g, len(self.parities))
        for s, c in local.terms.items():
            parity = flip = 0
            for w in members(s):
                parity ^= self.parities[w]
                flip ^= self.flips[w]
            if not parity:
                raise AssertionError('linear frame lost rank')
            yield PhaseGadget(parity, -c % 8 if flip else c)

    def is_identity(self) -> bool:
        return (
            not any(self.flips) and
            all(p == 1 << w for w, p in enumerate(self.parities))
        )


def extract_phase_polynomial(c: Circuit) -> PhasePolynomial:
    frame = ParityFrame(c.wire_count)
    gadgets: list[PhaseGadget] = []
    for g in c.gates:
        if g.kind in LINEAR:
            frame.push(g)
        elif g.kind in DIAGONAL:
            gadgets.extend(frame.gadgets(g))
        else:
            raise ValueError(f'{g.kind} is not a CNOT+phase gate')
    if not frame.is_identity():
        raise ValueError('circuit has a non-trivial linear part')
    return from_terms(c.wire_count, gadgets)


_PHASE_GATES = {
    1: ('T',),
    2: ('S',),
    3: ('S', 'T'),
    4: ('Z',),
    5: ('Z', 'T'),
    6: ('Sdg',),
    7: ('Tdg',),
}


def resynthesize(
        p: PhasePolynomial,
        names: Sequence[str] | None = None,
) -> Circuit:
    gates = []
    for s in sorted(p.terms, key=members):
        *rest, target = members(s)
        ladder = [Gate('CNOT', (w, target)) for w in rest]
        gates.extend(ladder)
        gates.extend(Gate(k, (target,)) for k in _PHASE_GATES[p.terms[s]])
        gates.extend(reversed(ladder))
    if names is None:
        names = tuple(f'q{w}' for w in range(p.width))
    return Circuit(tuple(names), tuple(gates))


def format_poly(p: PhasePolynomial) -> str:
    return ''.join(
        f'{p.terms[s]} {" ".join(str(w) for w in members(s))}\n'
        for s in sorted(p.terms, key=members)
    )


def parse_poly(text: str, width: int) -> PhasePolynomial:
    terms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line, _, _ = line.partition('#')
        parts = line.split()
        if not parts:
            continue
        try:
            coeff, *wires = (int(part) for part in parts)
        except ValueError:
            raise ValueError(f'line {lineno}: expected integers, got {line!r}')
        if not wires:
            raise ValueError(f'line {lineno}: term without wires')
        if any(w < 0 for w in wires):
            raise WidthMismatch(f'line {lineno}: negative wire index')
        terms.append((mask(wires), coeff))
    return from_terms(width, terms)
