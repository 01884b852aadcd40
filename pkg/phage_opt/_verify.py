"""Dense simulation oracles.

Wire 0 is the most significant bit of a basis index (tensor axis 0).
"""
from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Sequence
from math import pi
from math import sqrt

import numpy as np

from phage_opt._circuit import Circuit
from phage_opt._circuit import Gate
from phage_opt._cldcl import ClDClForm
from phage_opt._errors import PostSelectionError
from phage_opt._errors import SimulationTooLarge
from phage_opt._phase_poly import members
from phage_opt._phase_poly import PhasePolynomial

MAX_SIM_WIRES = 14
TOLERANCE = 1e-9

_SQRT2_INV, _T = 1 / sqrt(2), np.exp(1j * pi / 4)
_MATRICES = {
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Z': np.diag([1, -1]).astype(complex),
    'S': np.diag([1, 1j]),
    'Sdg': np.diag([1, -1j]),
    'T': np.diag([1, _T]),
    'Tdg': np.diag([1, np.conj(_T)]),
    'H': np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    'CZ': np.diag([1, 1, 1, -1]).astype(complex),
    'CCZ': np.diag([1] * 7 + [-1]).astype(complex),
    'SWAP': np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}


def _controlled_x(wires: int) -> np.ndarray:
    dim = 1 << wires
    perm = list(range(dim))
    perm[-2], perm[-1] = perm[-1], perm[-2]
    return np.eye(dim, dtype=complex)[perm]


def gate_matrix(g: Gate) -> np.ndarray:
    if g.kind in {'CNOT', 'CCNOT', 'MCNOT'}:
        return _controlled_x(len(g.wires))
    return _MATRICES[g.kind]


def _apply(state: np.ndarray, g: Gate, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    op = gate_matrix(g).reshape((2,) * (2 * k))
    state = np.tensordot(op, state, axes=(tuple(range(k, 2 * k)), tuple(axes)))
    return np.moveaxis(state, tuple(range(k)), tuple(axes))


def _apply_all(
        state: np.ndarray,
        gates: Iterable[Gate],
        axis_of: Sequence[int] | None = None,
) -> np.ndarray:
    for g in gates:
        if axis_of is None:
            axes: Sequence[int] = g.wires
        else:
            axes = [axis_of[w] for w in g.wires]
        state = _apply(state, g, axes)
    return state


def _check_width(width: int, max_wires: int) -> None:
    if width > max_wires:
        raise SimulationTooLarge(
            f'{width} wires exceeds the simulation cap of {max_wires}',
        )


def simulate_unitary(c: Circuit, max_wires: int = MAX_SIM_WIRES) -> np.ndarray:
    n = c.wire_count
    _check_width(n, max_wires)
    dim = 1 << n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    return _apply_all(state, c.gates).reshape(dim, dim)


def _phase_vector(p: PhasePolynomial) -> np.ndarray:
    n = p.width
    idx = np.arange(1 << n, dtype=np.int64)
    exponents = np.zeros_like(idx)
    for s, c in p.terms.items():
        parity = np.zeros_like(idx)
        for w in members(s):
            parity ^= (idx >> (n - 1 - w)) & 1
        exponents += c * parity
    return np.exp(1j * pi / 4 * (exponents % 8))


def diagonal_unitary(p: PhasePolynomial, max_wires: int = MAX_SIM_WIRES) -> np.ndarray:
    _check_width(p.width, max_wires)
    return np.diag(_phase_vector(p))


def simulate_cldcl_postselected(
        f: ClDClForm,
        max_wires: int = MAX_SIM_WIRES,
) -> np.ndarray:
    """Unitary on the input wires, assuming every measurement reads |+>."""
    _check_width(f.width, max_wires)
    n, width = f.n_inputs, f.width
    ancillas = width - n
    dim = 1 << n

    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    state = _apply_all(state, f.initial).reshape(dim, dim)
    plus = np.full(1 << ancillas, 2 ** (-ancillas / 2))
    state = (state[:, None, :] * plus[None, :, None]).reshape(1 << width, dim)

    state = state * _phase_vector(f.body)[:, None]
    state = _apply_all(state.reshape((2,) * width + (dim,)), f.linear)

    measured = [e.wire for e in f.measurements]
    bra = np.full(2, _SQRT2_INV)
    for w in sorted(measured, reverse=True):
        state = np.tensordot(bra, state, axes=((0,), (w,)))
    remaining = [w for w in range(width) if w not in measured]
    axis_of = {w: i for i, w in enumerate(remaining)}
    if any(w in measured for g in f.final for w in g.wires):
        raise AssertionError('final layer touches a measured wire')
    state = _apply_all(state, f.final, axis_of)

    order = [axis_of[f.wire_map[w]] for w in range(n)]
    if len(remaining) != n:
        raise AssertionError(f'{len(remaining)} unmeasured wires, expected {n}')
    state = np.transpose(state, (*order, n)).reshape(dim, dim)

    norm = np.linalg.norm(state) / sqrt(dim)
    if norm < TOLERANCE:
        raise PostSelectionError('post-selected branch has zero amplitude')
    expected = 2 ** (-len(measured) / 2)
    if abs(norm - expected) > 1e-6:
        raise AssertionError(f'post-selection norm {norm}, expected {expected}')
    return state / norm


def _relative_phase(a: np.ndarray, b: np.ndarray) -> complex:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < TOLERANCE:
        return 1
    ratio = a[idx] / b[idx]
    return ratio / abs(ratio)


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f'dimension mismatch: {a.shape} vs {b.shape}')


def max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    _check_shapes(a, b)
    return float(np.max(np.abs(a - _relative_phase(a, b) * b), initial=0))


def equal_up_to_global_phase(
        a: np.ndarray,
        b: np.ndarray,
        tol: float = TOLERANCE,
) -> bool:
    return max_deviation(a, b) <= tol
