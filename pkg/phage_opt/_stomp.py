from __future__ import annotations

import itertools
import pkgutil
from collections.abc import Sequence
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import NamedTuple

from phage_opt import _tactics
from phage_opt._errors import WidthMismatch
from phage_opt._phase_poly import fuse
from phage_opt._phase_poly import mask
from phage_opt._phase_poly import members
from phage_opt._phase_poly import negate
from phage_opt._phase_poly import odd_terms
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._phase_poly import popcount
from phage_opt._phase_poly import t_count
from phage_opt._spidernest import SpiderNestIdentity

Generator = Callable[[int, int], Sequence[SpiderNestIdentity]]


class TacticFamily(NamedTuple):
    name: str
    size: int
    generator: Generator


class TacticOutcome(NamedTuple):
    applied: bool
    chosen: str | None
    t_before: int
    t_after: int


FAMILIES: dict[str, TacticFamily] = {}


def register(name: str, size: int) -> Callable[[Generator], Generator]:
    def register_decorator(func: Generator) -> Generator:
        FAMILIES[name] = TacticFamily(name, size, func)
        return func
    return register_decorator


def _growth(p: PhasePolynomial, q: PhasePolynomial) -> int:
    """Change in the number of stored terms when fusing `q` into `p`."""
    ret = 0
    for s, c in q.terms.items():
        old = p.terms.get(s, 0)
        ret += bool((old + c) % 8) - bool(old)
    return ret


def phage_apply(
        p: PhasePolynomial,
        family: TacticFamily,
        s: int,
) -> tuple[PhasePolynomial, TacticOutcome]:
    """Fuse the best identity of `family` on `s` (or its inverse) into `p`.

    Fusing an identity J flips the parity of every odd term of J, so the
    T-count changes by len(odd(J)) - 2 * len(odd(J) & odd(p)); a candidate
    is only fused when that is negative.  Equal T-counts prefer the result
    with fewer terms, then the earlier candidate.
    """
    if s >> p.width:
        raise WidthMismatch(f'{members(s)} does not fit width {p.width}')
    before = t_count(p)
    odd = odd_terms(p)

    best: tuple[tuple[int, int], PhasePolynomial, str] | None = None
    for identity in family.generator(s, p.width):
        candidate_odd = odd_terms(identity.poly)
        delta = len(candidate_odd) - 2 * len(candidate_odd & odd)
        if delta >= 0:
            continue
        for poly, suffix in ((identity.poly, ''), (negate(identity.poly), '^-1')):
            key = (before + delta, _growth(p, poly))
            if best is None or key < best[0]:
                best = (key, poly, identity.descriptor + suffix)

    if best is None:
        return p, TacticOutcome(False, None, before, before)

    (expected, _), poly, chosen = best
    ret = fuse(p, poly)
    if t_count(ret) != expected or expected >= before:
        raise AssertionError(f'{chosen} did not reduce the T-count')
    return ret, TacticOutcome(True, chosen, before, expected)


def _min_odd(family: TacticFamily) -> int:
    template = mask(range(family.size))
    return min(
        len(odd_terms(identity.poly))
        for identity in family.generator(template, family.size)
    )


def _contained(small_odd: list[int], s: int) -> int:
    return sum(1 for t in small_odd if not t & ~s)


def sweep(
        p: PhasePolynomial,
        family: TacticFamily,
) -> tuple[PhasePolynomial, dict[str, Any]]:
    """Apply `family` to every subset of its size in lexicographic order."""
    threshold = _min_odd(family)
    stats: dict[str, Any] = {
        'family': family.name,
        'subsets': 0,
        'rewrites': 0,
        'tCounts': [t_count(p)],
    }

    def small_odd_terms() -> list[int]:
        return [t for t in odd_terms(p) if popcount(t) <= family.size]

    small = small_odd_terms()
    for wires in itertools.combinations(range(p.width), family.size):
        s = mask(wires)
        stats['subsets'] += 1
        # an identity only wins when more than half of its odd terms cancel
        if 2 * _contained(small, s) <= threshold:
            continue
        p, outcome = phage_apply(p, family, s)
        if outcome.applied:
            stats['rewrites'] += 1
            stats['tCounts'].append(outcome.t_after)
            small = small_odd_terms()
    return p, stats


def run_strategy(
        p: PhasePolynomial,
        passes: int = 1,
        *,
        families: Sequence[str] = ('stomp4', 'stomp5'),
        stats: list[dict[str, Any]] | None = None,
) -> PhasePolynomial:
    """Sweep each family in turn; `passes=0` repeats until nothing changes."""
    if passes < 0:
        raise ValueError(f'passes must be >= 0, got {passes}')
    n = 0
    while passes == 0 or n < passes:
        n += 1
        rewrites = 0
        for name in families:
            p, family_stats = sweep(p, FAMILIES[name])
            rewrites += family_stats['rewrites']
            if stats is not None:
                stats.append({'pass': n, **family_stats})
        if not rewrites:
            break
    return p


def _density(p: PhasePolynomial, q: int, max_size: int | None) -> Fraction:
    if not 0 <= q < p.width:
        raise WidthMismatch(f'wire {q} outside width {p.width}')
    ret = Fraction(0)
    for s in odd_terms(p):
        k = popcount(s)
        if s >> q & 1 and (max_size is None or k <= max_size):
            ret += Fraction(1, k)
    return ret


def density(p: PhasePolynomial, q: int) -> Fraction:
    return _density(p, q, None)


def density3(p: PhasePolynomial, q: int) -> Fraction:
    return _density(p, q, 3)


def stomp4(p: PhasePolynomial, s: int) -> tuple[PhasePolynomial, TacticOutcome]:
    if popcount(s) != 4:
        raise ValueError(f'stomp4 needs a 4-subset, got {members(s)}')
    return phage_apply(p, FAMILIES['stomp4'], s)


def stomp5(
        p: PhasePolynomial,
        s: int,
        *,
        family: str = 'stomp5',
) -> tuple[PhasePolynomial, TacticOutcome]:
    if popcount(s) != 5:
        raise ValueError(f'stomp5 needs a 5-subset, got {members(s)}')
    return phage_apply(p, FAMILIES[family], s)


def _import_plugins() -> None:
    # trigger an import of all of the tactic families
    plugins_path = _tactics.__path__
    mod_infos = pkgutil.walk_packages(plugins_path, f'{_tactics.__name__}.')
    for _, name, _ in mod_infos:
        __import__(name, fromlist=['_trash'])


_import_plugins()
