from __future__ import annotations

import functools
import itertools

from phage_opt._phase_poly import empty
from phage_opt._phase_poly import fuse
from phage_opt._phase_poly import mask
from phage_opt._phase_poly import members
from phage_opt._phase_poly import negate
from phage_opt._phase_poly import PhasePolynomial
from phage_opt._phase_poly import relabel
from phage_opt._spidernest import gen_nest
from phage_opt._spidernest import SpiderNestIdentity
from phage_opt._stomp import register

Template = tuple[tuple[int, ...], PhasePolynomial]


@functools.lru_cache(maxsize=None)
def templates(skip_subnests: bool = False) -> tuple[Template, ...]:
    """Products N_S^p0 * N_{S-j}^-pj on the local wires 0..4.

    The N_{S-j} factors enter inverted, which makes the (1, .., 1, ..)
    members exactly the composite identities; the odd terms, and so the
    T-count effect, are the same as for the plain product.
    """
    full = mask(range(5))
    nests = [gen_nest(full, 5).poly]
    nests.extend(negate(gen_nest(full & ~(1 << j), 5).poly) for j in range(5))

    ret = []
    for exponents in itertools.product((0, 1), repeat=6):
        if not any(exponents):
            continue
        # lone sub-nests repeat what stomp4 already tried
        elif skip_subnests and not exponents[0] and sum(exponents) == 1:
            continue
        poly = empty(5)
        for e, nest in zip(exponents, nests):
            if e:
                poly = fuse(poly, nest)
        ret.append((exponents, poly))
    return tuple(ret)


def _family(s: int, width: int, skip_subnests: bool) -> list[SpiderNestIdentity]:
    wires = members(s)
    return [
        SpiderNestIdentity(
            poly=relabel(poly, wires, width),
            support=s,
            descriptor=f'N5{wires}^{"".join(str(e) for e in exponents)}',
        )
        for exponents, poly in templates(skip_subnests)
    ]


@register('stomp5', 5)
def composite_family(s: int, width: int) -> list[SpiderNestIdentity]:
    return _family(s, width, skip_subnests=False)


@register('stomp5-58', 5)
def composite_family_58(s: int, width: int) -> list[SpiderNestIdentity]:
    return _family(s, width, skip_subnests=True)
