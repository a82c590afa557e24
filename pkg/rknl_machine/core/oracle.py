"""
Normal-order (leftmost-outermost) beta reduction.

This is the reference reducer the machines are checked against: one redex
search from the root per step and textbook capture-avoiding substitution.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from immutables import Map

from rknl_machine.common.exception import FuelExhausted
from rknl_machine.core.term import (ContextFrame, ContextPath, Ident, Lam, Step, Term, Var,
                                    replace_at, transform, unwind_spine)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RedexSite:
    path: ContextPath
    binder: Ident
    body: Term
    argument: Term


@dataclass(frozen=True)
class NormalizeResult:
    normal_form: Term
    beta_steps: int


def fresh_for(base: Ident, avoid) -> Ident:
    """The first fresh-namespace variant of ``base`` outside ``avoid``."""
    k = 0
    while Ident.fresh(base.base, k) in avoid:
        k += 1
    return Ident.fresh(base.base, k)


def subst(t: Term, x: Ident, s: Term) -> Term:
    """``t{x:=s}``, renaming binders of ``t`` that would capture free variables of ``s``."""
    def keep(node, env):
        return not any(v in node.free_vars for v in env)

    def on_var(var, env):
        return env[var.ident]

    def on_lam(lam, env):
        binder, body = lam.binder, lam.body
        inner = env.delete(binder) if binder in env else env
        live = [v for v in inner if v in body.free_vars]
        if not any(binder in inner[v].free_vars for v in live):
            return binder, inner
        avoid = set(s.free_vars)
        for v in body.free_vars:
            avoid |= inner[v].free_vars if v in inner else {v}
        renamed = fresh_for(binder, avoid)
        return renamed, inner.set(binder, Var(renamed))

    return transform(t, Map({x: s}), on_var, on_lam, keep)


def _path(trail, lams: int, lefts: int, into_arg: bool) -> ContextPath:
    segments = [(lams, lefts, into_arg)]
    while trail is not None:
        trail, segment = trail
        segments.append(segment)
    path = []
    for lams, lefts, into_arg in reversed(segments):
        path.extend([Step.LAM_BODY] * lams)
        path.extend([Step.APP_LEFT] * lefts)
        if into_arg:
            path.append(Step.APP_RIGHT)
    return tuple(path)


def find_redex(t: Term) -> Optional[RedexSite]:
    """
    The leftmost-outermost redex, following the outside-in automaton: under
    abstractions in state N, down the head spine in state N-bar, and into an
    argument only when everything to its left is neutral.
    """
    # depth-first with the leftmost argument on top; trail links (parent trail, segment)
    todo = [(t, None)]
    while todo:
        node, trail = todo.pop()
        lams = 0
        while isinstance(node, Lam):
            lams += 1
            node = node.body
        head, args = unwind_spine(node)
        k = len(args)
        if isinstance(head, Lam):
            return RedexSite(_path(trail, lams, k - 1, False), head.binder, head.body, args[0])
        for i in range(k, 0, -1):
            todo.append((args[i - 1], (trail, (lams, k - i, True))))
    return None


def contract(site: RedexSite) -> Term:
    return subst(site.body, site.binder, site.argument)


def no_step(t: Term) -> Optional[Term]:
    site = find_redex(t)
    if site is None:
        return None
    return replace_at(t, site.path, contract(site))


def no_reduce(t: Term) -> Iterator[Term]:
    """Successive normal-order reducts of ``t``, excluding ``t`` itself."""
    while True:
        t = no_step(t)
        if t is None:
            return
        yield t


def no_normalize(t: Term, fuel: int) -> NormalizeResult:
    steps = 0
    while True:
        nxt = no_step(t)
        if nxt is None:
            logger.debug(f"normal order finished after {steps} beta steps")
            return NormalizeResult(t, steps)
        if steps >= fuel:
            raise FuelExhausted(term=t, steps=steps)
        t = nxt
        steps += 1


def is_neutral(t: Term) -> bool:
    head, args = unwind_spine(t)
    return isinstance(head, Var) and all(is_normal(a) for a in args)


def is_normal(t: Term) -> bool:
    seen = set()
    todo = [t]
    while todo:
        node = todo.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        while isinstance(node, Lam):
            node = node.body
        head, args = unwind_spine(node)
        if not isinstance(head, Var):
            return False
        todo.extend(args)
    return True


# inside-out context automaton states, named after the grammar nonterminal
# whose contexts they have read so far: N-bar (hole on the head spine) is
# initial, N (any normal-order context) accepting
_N_BAR = "N-bar"
_N = "N"


def _closure(states):
    return states | {_N} if _N_BAR in states else states


def is_no_context(frames: Sequence[ContextFrame]) -> bool:
    """
    Whether a context, given from the hole outward, is a normal-order
    context. Reads ``□ t`` in N-bar, ``λx.□`` in N and ``a □`` (a neutral)
    from N to N-bar, with an empty move from N-bar to N.
    """
    states = _closure({_N_BAR})
    for frame in frames:
        nxt = set()
        if frame.step is Step.APP_LEFT and _N_BAR in states:
            nxt.add(_N_BAR)
        elif frame.step is Step.LAM_BODY and _N in states:
            nxt.add(_N)
        elif frame.step is Step.APP_RIGHT and _N in states and is_neutral(frame.other):
            nxt.add(_N_BAR)
        states = _closure(nxt)
        if not states:
            return False
    return _N in states
