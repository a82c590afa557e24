"""
The RKNL abstract machine for strong call-by-need normalization.

A configuration is either evaluating a closure (:class:`EvalConfig`) or
returning a value to its stack (:class:`ContConfig`). Transitions are
numbered 1 to 11; the first one whose pattern matches applies.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from rknl_machine.common.constants import Constants, Rule
from rknl_machine.common.exception import IllFormed
from rknl_machine.core.term import App, Ident, Lam, Namespace, Term, Var, term_eq, term_graph
from rknl_machine.core.syntax import print_term
from rknl_machine.machines.stack import EMPTY_STACK, Stack
from rknl_machine.machines.store import (BY_RULE2, EMPTY_ENV, TODO_EMPTY, AnnotAbs, ByRule6, ByRule7,
                                         Closure, Done, FreshNames, Location, LocationKind, PlainTerm,
                                         Store, StoreView, TodoClosure, Value)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arg:
    """``□ c``: an argument waiting for the function."""
    closure: Closure


@dataclass(frozen=True)
class LApp:
    """``t □``: a neutral function waiting for its normalized argument."""
    term: Term


@dataclass(frozen=True)
class LamF:
    """``λx.□``: a body being normalized under its binder."""
    binder: Ident


@dataclass(frozen=True)
class Cache:
    """``ℓ := □``: the value under computation is memoized at ``location``."""
    location: Location


Frame = Union[Arg, LApp, LamF, Cache]


@dataclass(frozen=True)
class EvalConfig:
    closure: Closure
    stack: Stack
    store: StoreView

    mode = "eval"


@dataclass(frozen=True)
class ContConfig:
    value: Value
    stack: Stack
    store: StoreView

    mode = "cont"


Config = Union[EvalConfig, ContConfig]


@dataclass(frozen=True)
class MachineOptions:
    no8: bool = False
    max_fresh_index: int = Constants.MAX_FRESH_INDEX


DEFAULT_OPTIONS = MachineOptions()
NO8_OPTIONS = MachineOptions(no8=True)


@dataclass(frozen=True)
class Transition:
    next: Config
    rule: Rule


@dataclass(frozen=True)
class Terminal:
    term: Term


@dataclass(frozen=True)
class NormalForm:
    term: Term


@dataclass(frozen=True)
class Exhausted:
    """The run stopped because it ran out of fuel."""
    fuel: int


@dataclass(frozen=True)
class TraceEntry:
    step: int
    rule: Optional[Rule]
    config: Config


@dataclass
class RunResult:
    source: Term
    outcome: Union[NormalForm, Exhausted]
    steps: int
    rule_histogram: Dict[int, int]
    final: Config
    rules: List[int] = field(default_factory=list)
    trace: List[TraceEntry] = field(default_factory=list)

    @property
    def beta_steps(self) -> int:
        return self.rule_histogram[int(Rule.BETA)]

    @property
    def completed(self) -> bool:
        return isinstance(self.outcome, NormalForm)

    @property
    def normal_form(self) -> Optional[Term]:
        return self.outcome.term if self.completed else None


def fresh_idents(t: Term):
    """Fresh-namespace identifiers occurring in ``t``, bound or free."""
    found = set()
    for _, data in term_graph(t).nodes(data=True):
        node = data["term"]
        if isinstance(node, Var) and node.ident.namespace is Namespace.FRESH:
            found.add(node.ident)
        elif isinstance(node, Lam) and node.binder.namespace is Namespace.FRESH:
            found.add(node.binder)
    return found


def unload(k: Config) -> Optional[Term]:
    if isinstance(k, ContConfig) and not k.stack and isinstance(k.value, PlainTerm):
        return k.value.term
    return None


class Machine:
    def __init__(self, options: MachineOptions = None):
        self._options = options if options else DEFAULT_OPTIONS

    @property
    def options(self) -> MachineOptions:
        return self._options

    def load(self, t: Term) -> EvalConfig:
        names = FreshNames(reserved=fresh_idents(t), limit=self._options.max_fresh_index)
        store = Store(names)
        return EvalConfig(Closure(t, EMPTY_ENV), EMPTY_STACK, store.view())

    def step(self, k: Config) -> Union[Transition, Terminal]:
        term = unload(k)
        if term is not None:
            return Terminal(term)
        if not k.store.is_current:
            raise IllFormed(f"configuration at time {k.store.time} is stale, store is at {k.store.store.clock}")
        store = k.store.store
        now = store.view(store.tick())

        match k:
            case EvalConfig(closure=Closure(term=App(fun=t1, arg=t2), env=e), stack=s):
                return Transition(EvalConfig(Closure(t1, e), s.push(Arg(Closure(t2, e))), now), Rule.APP)

            case EvalConfig(closure=Closure(term=Lam() as lam, env=e), stack=s):
                annot = store.alloc(LocationKind.ANNOT, TODO_EMPTY, BY_RULE2)
                return Transition(ContConfig(AnnotAbs(lam, e, annot), s, now), Rule.ABS)

            case EvalConfig(closure=Closure(term=Var(ident=x) as var, env=e), stack=s):
                location = e.get(x)
                if location is None:
                    return Transition(ContConfig(PlainTerm(var), s, now), Rule.LOOKUP)
                if location.kind is not LocationKind.ARG:
                    raise IllFormed(f"environment maps {x} to annotation location {location}")
                match now.get(location):
                    case TodoClosure(closure=c):
                        return Transition(EvalConfig(c, s.push(Cache(location)), now), Rule.FORCE)
                    case Done(value=v):
                        return Transition(ContConfig(v, s, now), Rule.LOOKUP)
                raise IllFormed(f"variable {x} maps to an empty cell {location}")

            case ContConfig(value=v, stack=Stack(top=Cache(location=location), rest=s)):
                store.write(location, Done(v), rewrite=self._options.no8)
                return Transition(ContConfig(v, s, now), Rule.MEMO)

            case ContConfig(value=AnnotAbs() as v, stack=Stack(top=Arg(closure=c), rest=s)):
                location = store.alloc(LocationKind.ARG, TodoClosure(c), ByRule6(c))
                return Transition(EvalConfig(Closure(v.body, v.env.set(v.binder, location)), s, now), Rule.BETA)

            case ContConfig(value=AnnotAbs() as v, stack=s):
                cell = now.get(v.annot)
                if cell is TODO_EMPTY or self._options.no8:
                    fresh = store.names(v.binder)
                    location = store.alloc(LocationKind.ARG, Done(PlainTerm(Var(fresh))), ByRule7(fresh))
                    body = Closure(v.body, v.env.set(v.binder, location))
                    return Transition(EvalConfig(body, s.push(Cache(v.annot)).push(LamF(fresh)), now),
                                      Rule.NORMALIZE_BODY)
                if isinstance(cell, Done):
                    return Transition(ContConfig(cell.value, s, now), Rule.REUSE)
                raise IllFormed(f"annotation location {v.annot} holds {cell}")

            case ContConfig(value=PlainTerm(term=t), stack=Stack(top=Arg(closure=c), rest=s)):
                return Transition(EvalConfig(c, s.push(LApp(t)), now), Rule.ARG_NORMALIZE)

            case ContConfig(value=PlainTerm(term=t2), stack=Stack(top=LApp(term=t1), rest=s)):
                return Transition(ContConfig(PlainTerm(App(t1, t2)), s, now), Rule.REBUILD_APP)

            case ContConfig(value=PlainTerm(term=t), stack=Stack(top=LamF(binder=x), rest=s)):
                return Transition(ContConfig(PlainTerm(Lam(x, t)), s, now), Rule.REBUILD_ABS)

        raise IllFormed(f"no transition applies to {k!r}")

    def applicable_rules(self, k: Config) -> List[Rule]:
        """
        Every rule whose guard holds, each guard evaluated on its own. On a
        reachable configuration the result has exactly one element, or none
        when the configuration is final.
        """
        rules = []
        top = k.stack.top
        if isinstance(k, EvalConfig):
            term, env = k.closure.term, k.closure.env
            if isinstance(term, App):
                rules.append(Rule.APP)
            if isinstance(term, Lam):
                rules.append(Rule.ABS)
            if isinstance(term, Var):
                location = env.get(term.ident)
                cell = k.store.get(location) if location is not None else None
                if isinstance(cell, TodoClosure):
                    rules.append(Rule.FORCE)
                if location is None or isinstance(cell, Done):
                    rules.append(Rule.LOOKUP)
            return rules
        v = k.value
        if isinstance(top, Cache):
            rules.append(Rule.MEMO)
        if isinstance(v, AnnotAbs):
            if isinstance(top, Arg):
                rules.append(Rule.BETA)
            if not isinstance(top, (Arg, Cache)):
                cell = k.store.get(v.annot)
                if cell is TODO_EMPTY or self._options.no8:
                    rules.append(Rule.NORMALIZE_BODY)
                if isinstance(cell, Done) and not self._options.no8:
                    rules.append(Rule.REUSE)
        else:
            if isinstance(top, Arg):
                rules.append(Rule.ARG_NORMALIZE)
            if isinstance(top, LApp):
                rules.append(Rule.REBUILD_APP)
            if isinstance(top, LamF):
                rules.append(Rule.REBUILD_ABS)
        return rules

    def run(self, t: Term, fuel: int = Constants.DEFAULT_FUEL, trace: bool = False) -> RunResult:
        k = self.load(t)
        histogram = {int(r): 0 for r in Rule}
        entries = [TraceEntry(0, None, k)] if trace else []
        rules = []
        steps = 0
        while True:
            term = unload(k)
            if term is not None:
                outcome = NormalForm(term)
                break
            if steps >= fuel:
                outcome = Exhausted(fuel)
                break
            result = self.step(k)
            k = result.next
            steps += 1
            histogram[int(result.rule)] += 1
            rules.append(int(result.rule))
            if trace:
                entries.append(TraceEntry(steps, result.rule, k))

        logger.debug(f"rknl run {'no8 ' if self._options.no8 else ''}finished: "
                     f"{type(outcome).__name__} steps={steps} beta={histogram[int(Rule.BETA)]}")
        return RunResult(source=t, outcome=outcome, steps=steps, rule_histogram=histogram,
                         final=k, rules=rules, trace=entries)


def load(t: Term) -> EvalConfig:
    return Machine().load(t)


def step(k: Config, opts: MachineOptions = DEFAULT_OPTIONS) -> Union[Transition, Terminal]:
    return Machine(opts).step(k)


def run(t: Term, opts: MachineOptions = DEFAULT_OPTIONS, fuel: int = Constants.DEFAULT_FUEL,
        trace: bool = False) -> RunResult:
    return Machine(opts).run(t, fuel=fuel, trace=trace)


def focus_term(k: Config) -> Term:
    if isinstance(k, EvalConfig):
        return k.closure.term
    if isinstance(k.value, AnnotAbs):
        return k.value.lam
    return k.value.term


def trace_record(entry: TraceEntry, style: str = Constants.DEFAULT_STYLE) -> dict:
    k = entry.config
    return {
        "step": entry.step,
        "rule": int(entry.rule),
        "mode": k.mode,
        "focus": print_term(focus_term(k), style),
        "stack_depth": len(k.stack),
        "store_size": k.store.size,
    }


def _values_equal(a: Value, b: Value, known: dict) -> bool:
    if isinstance(a, PlainTerm) and isinstance(b, PlainTerm):
        return term_eq(a.term, b.term, known)
    return isinstance(a, AnnotAbs) and a == b


def _frames_equal(a: Frame, b: Frame, known: dict) -> bool:
    if isinstance(a, LApp) and isinstance(b, LApp):
        return term_eq(a.term, b.term, known)
    return a == b


def _cells_equal(a, b, known: dict) -> bool:
    if isinstance(a, Done) and isinstance(b, Done):
        return _values_equal(a.value, b.value, known)
    return a == b


def config_eq(a: Config, b: Config, known: dict = None) -> bool:
    """
    Exact equality of configurations: closures by term identity and equal
    environments, plain terms structurally, stores cell by cell with their
    location ids. ``known`` carries term pairs already proven equal.
    """
    known = {} if known is None else known
    if type(a) is not type(b):
        return False
    if isinstance(a, EvalConfig):
        if a.closure != b.closure:
            return False
    elif not _values_equal(a.value, b.value, known):
        return False
    if len(a.stack) != len(b.stack):
        return False
    if not all(_frames_equal(x, y, known) for x, y in zip(a.stack, b.stack)):
        return False
    if a.store.size != b.store.size:
        return False
    for (la, ca), (lb, cb) in zip(a.store.cells(), b.store.cells()):
        if la != lb or not _cells_equal(ca, cb, known):
            return False
    return True
