from __future__ import annotations

from phage_opt._spidernest import gen_nest
from phage_opt._spidernest import SpiderNestIdentity
from phage_opt._stomp import register


@register('stomp4', 4)
def nest_family(s: int, width: int) -> list[SpiderNestIdentity]:
    return [gen_nest(s, width)]
