"""
Term corpora for the verification suites: seeded random closed terms and
an exhaustive enumeration of small terms.
"""

import random
from typing import Dict, Iterator, List, Sequence, Tuple

from rknl_machine.core.term import App, Ident, Lam, Term, Var

NAMES = ("x", "y", "z")


def _random_term(rng: random.Random, size: int, scope: Tuple[Ident, ...], names: Sequence[Ident]) -> Term:
    # a variable needs a binder in scope; an application of closed parts needs two lambdas
    if size == 1:
        return Var(rng.choice(scope))
    lo = 1 if scope else 2
    can_apply = size - 1 >= 2 * lo
    if can_apply and rng.random() < 0.5:
        left = rng.randint(lo, size - 1 - lo)
        return App(_random_term(rng, left, scope, names), _random_term(rng, size - 1 - left, scope, names))
    binder = rng.choice(names)
    return Lam(binder, _random_term(rng, size - 1, scope + (binder,), names))


def random_closed_terms(seed: int, count: int, max_size: int, names: Sequence[str] = NAMES) -> List[Term]:
    """``count`` closed terms of size 2 to ``max_size``, reproducible from ``seed``."""
    rng = random.Random(seed)
    idents = [Ident.source(n) for n in names]
    return [_random_term(rng, rng.randint(2, max(2, max_size)), (), idents) for _ in range(count)]


def enumerate_terms(max_size: int, names: Sequence[str] = ("x", "y")) -> Iterator[Term]:
    """Every term of size at most ``max_size`` over ``names``, free variables included."""
    idents = [Ident.source(n) for n in names]
    by_size: Dict[int, List[Term]] = {}
    for size in range(1, max_size + 1):
        terms = []
        if size == 1:
            terms.extend(Var(x) for x in idents)
        else:
            terms.extend(Lam(x, body) for x in idents for body in by_size[size - 1])
            for left in range(1, size - 1):
                for fun in by_size[left]:
                    terms.extend(App(fun, arg) for arg in by_size[size - 1 - left])
        by_size[size] = terms
        yield from terms
