from __future__ import annotations

import os.path
import random

from phage_opt._circuit import ARITY
from phage_opt._circuit import Circuit
from phage_opt._circuit import gate
from phage_opt._phase_poly import from_terms
from phage_opt._phase_poly import PhasePolynomial

RESOURCES = os.path.join(os.path.dirname(__file__), 'resources')

_KINDS = tuple(sorted(k for k, arity in ARITY.items() if arity is not None))


def random_circuit(
        rng: random.Random,
        wires: int,
        gates: int,
        kinds: tuple[str, ...] = _KINDS,
) -> Circuit:
    kinds = tuple(k for k in kinds if (ARITY[k] or 4) <= wires)
    ret = []
    for _ in range(gates):
        kind = rng.choice(kinds)
        arity = ARITY[kind]
        if arity is None:
            arity = rng.randint(4, wires)
        ret.append(gate(kind, *rng.sample(range(wires), arity)))
    return Circuit(tuple(f'q{i}' for i in range(wires)), tuple(ret))


def random_poly(rng: random.Random, width: int, terms: int) -> PhasePolynomial:
    return from_terms(
        width,
        ((rng.randrange(1, 1 << width), rng.randrange(1, 8)) for _ in range(terms)),
    )
