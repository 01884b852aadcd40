from __future__ import annotations

import itertools
from typing import NamedTuple

from phage_opt._errors import IdentityError
from phage_opt._phase_poly import from_terms
from phage_opt._phase_poly import fuse
from phage_opt._phase_poly import mask
from phage_opt._phase_poly import members
from phage_opt._phase_poly import negate
from phage_opt._phase_poly import phase_table
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._phase_poly import popcount
from phage_opt._phase_poly import relabel

MAX_IDENTITY_SUPPORT = 20


class SpiderNestIdentity(NamedTuple):
    poly: PhasePolynomial
    support: int
    descriptor: str


class NestCoefficients(NamedTuple):
    singles: int
    pairs: int
    triples: int
    top: int


def nest_coefficients(n: int) -> NestCoefficients:
    if n < 4:
        raise IdentityError(f'spider nests need at least 4 wires, got {n}')
    return NestCoefficients(
        singles=(n - 2) * (n - 3) // 2 % 8,
        pairs=-(n - 3) % 8,
        triples=1,
        top=7,
    )


def _width(support: int, width: int | None) -> int:
    return support.bit_length() if width is None else width


def gen_nest(s: int, width: int | None = None) -> SpiderNestIdentity:
    wires = members(s)
    coeffs = nest_coefficients(len(wires))
    by_size = {1: coeffs.singles, 2: coeffs.pairs, 3: coeffs.triples}
    terms = [
        (mask(sub), by_size[r])
        for r in (1, 2, 3)
        for sub in itertools.combinations(wires, r)
    ]
    terms.append((s, coeffs.top))
    return SpiderNestIdentity(
        poly=from_terms(_width(s, width), terms),
        support=s,
        descriptor=f'N{wires}',
    )


def gen_subset_parity_identity(
        v: int,
        k: int = 3,
        width: int | None = None,
) -> SpiderNestIdentity:
    wires = members(v)
    if not 1 <= k <= 3:
        raise IdentityError(f'order {k} is outside Z8')
    elif len(wires) <= k:
        raise IdentityError(f'need more than {k} wires, got {len(wires)}')
    unit = 2 ** (3 - k)
    terms = [
        (mask(sub), unit if r % 2 == 0 else -unit)
        for r in range(1, len(wires) + 1)
        for sub in itertools.combinations(wires, r)
    ]
    return SpiderNestIdentity(
        poly=from_terms(_width(v, width), terms),
        support=v,
        descriptor=f'P{wires},{k}',
    )


def gen_composite(
        s: int,
        r: int,
        width: int | None = None,
) -> SpiderNestIdentity:
    """N_S fused with the inverse of N_{S - {r}}."""
    if popcount(s) < 5:
        raise IdentityError('composite identities need at least 5 wires')
    elif not s >> r & 1:
        raise IdentityError(f'wire {r} is not in {members(s)}')
    width = _width(s, width)
    big = gen_nest(s, width).poly
    small = gen_nest(s & ~(1 << r), width).poly
    return SpiderNestIdentity(
        poly=fuse(big, negate(small)),
        support=s,
        descriptor=f'N{members(s)}/N-{r}',
    )


def t_count_formula(n: int) -> int:
    """T-count of the gadgets of size at most 3 in a spider nest on n wires."""
    if n < 4:
        raise IdentityError(f'spider nests need at least 4 wires, got {n}')
    elif n % 4 == 0:
        return n * (n * n + 5) // 6
    elif n % 4 == 1:
        return n * (n * n - 3 * n + 8) // 6
    elif n % 4 == 2:
        return n * (n - 1) * (n + 1) // 6
    else:
        return n * (n - 1) * (n - 2) // 6


def composite_t_count_formula(n: int) -> int:
    if n < 5:
        raise IdentityError(f'composite identities need at least 5 wires, got {n}')
    delta = 1 if n % 4 in {0, 1} else 0
    if n % 2:
        return n * n - 3 * n + 4 + delta
    else:
        return n * n - n + 2 + delta


def verify_identity(identity: SpiderNestIdentity) -> bool:
    """Exhaustively check that the identity is a global phase."""
    support = members(identity.support)
    if len(support) > MAX_IDENTITY_SUPPORT:
        raise IdentityError(
            f'support of {len(support)} wires is too large to enumerate',
        )
    stray = [s for s in identity.poly.terms if s & ~identity.support]
    if stray:
        return False
    if not support:
        return not identity.poly.terms
    local = {w: i for i, w in enumerate(support)}
    compact = relabel(
        identity.poly,
        [local.get(w, 0) for w in range(identity.poly.width)],
        len(support),
    )
    table = phase_table(compact) % 8
    return bool((table == table[0]).all())
