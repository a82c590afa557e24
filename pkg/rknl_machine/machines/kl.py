"""
KL: the lazy Krivine machine for weak call-by-need evaluation of closed
terms, the translation of weak RKNL configurations into KL configurations,
and the bisimulation check between the two.

KL works by substitution. Rule 6 binds the argument under a globally fresh
store name ``x'`` and renames the bound variable to it; the names live in the
location namespace so they never clash with source identifiers.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Union

from immutables import Map

from rknl_machine.common.constants import Constants, Rule
from rknl_machine.common.exception import IllFormed, InvalidInvocation, NotWeak, RKNLException, StuckOpen
from rknl_machine.core.syntax import print_term
from rknl_machine.core.term import App, Ident, Lam, Term, Var, term_eq, transform
from rknl_machine.machines.rknl import Arg, Cache, Config, EvalConfig, Machine, Terminal, Transition
from rknl_machine.machines.stack import EMPTY_STACK, Stack
from rknl_machine.machines.store import TODO_EMPTY, AnnotAbs, Location, LocationKind, TodoClosure

logger = logging.getLogger(__name__)


class KLMode(Enum):
    EVAL = "eval"
    CONT = "cont"


@dataclass(frozen=True)
class ArgT:
    term: Term


@dataclass(frozen=True)
class CacheV:
    name: Ident


KLFrame = Union[ArgT, CacheV]


@dataclass(frozen=True)
class KLConfig:
    mode: KLMode
    term: Term
    stack: Stack
    store: Map

    def __repr__(self):
        frames = ", ".join(f"□ {print_term(f.term)}" if isinstance(f, ArgT) else f"{f.name}:=□"
                           for f in self.stack)
        cells = ", ".join(f"{x}={print_term(t)}" for x, t in self.store.items())
        return f"<KL {self.mode.value} {print_term(self.term)} [{frames}] {{{cells}}}>"


@dataclass(frozen=True)
class KLTransition:
    next: KLConfig
    rule: Rule


@dataclass(frozen=True)
class Answer:
    store: Map
    value: Lam


@dataclass
class KLResult:
    source: Term
    answer: Optional[Answer]
    steps: int
    rules: List[int] = field(default_factory=list)
    trace: List[KLConfig] = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return self.answer is not None


def location_name(location: Location) -> Ident:
    return Ident.location(location.id)


def rename_free(t: Term, x: Ident, new: Ident) -> Term:
    """``t{x:=new}`` for a globally fresh ``new``; finding ``new`` bound in ``t`` is a bug."""
    replacement = Var(new)

    def on_lam(lam, env):
        if lam.binder == new:
            raise IllFormed(f"fresh name {new} is bound in the renamed term")
        return lam.binder, env

    return transform(t, Map(), lambda var, env: replacement, on_lam,
                     keep=lambda node, env: x not in node.free_vars)


class KLMachine:
    """
    KL with a pluggable supply of store names. By default the machine
    numbers them itself; a driver may hand in the name for each rule-6 step.
    """

    def __init__(self, names: Callable[[], Ident] = None):
        self._counter = 0
        self._names = names if names else self._next_name

    def _next_name(self) -> Ident:
        name = Ident.location(self._counter)
        self._counter += 1
        return name

    @staticmethod
    def load(t: Term) -> KLConfig:
        return KLConfig(KLMode.EVAL, t, EMPTY_STACK, Map())

    def step(self, q: KLConfig, name: Ident = None) -> Union[KLTransition, Answer]:
        s, store = q.stack, q.store
        if q.mode is KLMode.EVAL:
            t = q.term
            if isinstance(t, App):
                return KLTransition(KLConfig(KLMode.EVAL, t.fun, s.push(ArgT(t.arg)), store), Rule.APP)
            if isinstance(t, Lam):
                return KLTransition(KLConfig(KLMode.CONT, t, s, store), Rule.ABS)
            bound = store.get(t.ident)
            if bound is None:
                raise StuckOpen(name=str(t.ident))
            if isinstance(bound, Lam):
                return KLTransition(KLConfig(KLMode.CONT, bound, s, store), Rule.LOOKUP)
            return KLTransition(KLConfig(KLMode.EVAL, bound, s.push(CacheV(t.ident)), store), Rule.FORCE)

        if not s:
            return Answer(store, q.term)
        match s.top:
            case CacheV(name=x):
                return KLTransition(KLConfig(KLMode.CONT, q.term, s.rest, store.set(x, q.term)), Rule.MEMO)
            case ArgT(term=argument):
                fresh = name if name is not None else self._names()
                if fresh in store:
                    raise IllFormed(f"store name {fresh} is already in use")
                body = rename_free(q.term.body, q.term.binder, fresh)
                return KLTransition(KLConfig(KLMode.EVAL, body, s.rest, store.set(fresh, argument)), Rule.BETA)
        raise IllFormed(f"no KL transition applies to {q!r}")

    def run(self, t: Term, fuel: int = Constants.DEFAULT_FUEL, trace: bool = False) -> KLResult:
        q = self.load(t)
        result = KLResult(source=t, answer=None, steps=0, trace=[q] if trace else [])
        while True:
            outcome = self.step(q)
            if isinstance(outcome, Answer):
                result.answer = outcome
                break
            if result.steps >= fuel:
                break
            q = outcome.next
            result.steps += 1
            result.rules.append(int(outcome.rule))
            if trace:
                result.trace.append(q)
        logger.debug(f"kl run finished: {'answer' if result.completed else 'fuel exhausted'} steps={result.steps}")
        return result


def kl_load(t: Term) -> KLConfig:
    return KLMachine.load(t)


def kl_run(t: Term, fuel: int = Constants.DEFAULT_FUEL, trace: bool = False) -> KLResult:
    return KLMachine().run(t, fuel=fuel, trace=trace)


def kl_trace_record(step: int, rule: Optional[Rule], q: KLConfig, style: str = Constants.DEFAULT_STYLE) -> dict:
    return {
        "step": step,
        "rule": int(rule) if rule is not None else None,
        "mode": q.mode.value,
        "focus": print_term(q.term, style),
        "stack_depth": len(q.stack),
        "store_size": len(q.store),
    }


class _Translator:
    def __init__(self):
        self._memo: Dict[tuple, tuple] = {}

    @staticmethod
    def _keep(t: Term, env: Map) -> bool:
        # only variables mapped to locations change; binders shadow their entries
        return not any(v in env for v in t.free_vars)

    @staticmethod
    def _on_var(var: Var, env: Map) -> Term:
        return Var(location_name(env[var.ident]))

    @staticmethod
    def _on_lam(lam: Lam, env: Map):
        return lam.binder, env.delete(lam.binder) if lam.binder in env else env

    def closure(self, t: Term, env: Map) -> Term:
        return transform(t, env, self._on_var, self._on_lam, self._keep, self._memo)

    def value(self, v) -> Lam:
        if not isinstance(v, AnnotAbs):
            raise NotWeak(f"plain term value {v!r}")
        return self.closure(v.lam, v.env)


def translate(k: Config) -> KLConfig:
    """The KL configuration a weak RKNL configuration stands for."""
    tr = _Translator()
    frames = []
    for frame in k.stack:
        if isinstance(frame, Arg):
            frames.append(ArgT(tr.closure(frame.closure.term, frame.closure.env)))
        elif isinstance(frame, Cache) and frame.location.kind is LocationKind.ARG:
            frames.append(CacheV(location_name(frame.location)))
        else:
            raise NotWeak(f"frame {frame!r}")
    store = {}
    for location, cell in k.store.cells():
        if cell is TODO_EMPTY:
            continue
        if location.kind is not LocationKind.ARG:
            raise NotWeak(f"annotation cell {location} is done")
        if isinstance(cell, TodoClosure):
            store[location_name(location)] = tr.closure(cell.closure.term, cell.closure.env)
        else:
            store[location_name(location)] = tr.value(cell.value)
    if isinstance(k, EvalConfig):
        mode, term = KLMode.EVAL, tr.closure(k.closure.term, k.closure.env)
    else:
        mode, term = KLMode.CONT, tr.value(k.value)
    return KLConfig(mode, term, Stack.of(frames), Map(store))


def kl_config_eq(a: KLConfig, b: KLConfig, known: dict = None) -> bool:
    known = {} if known is None else known
    if a.mode is not b.mode or not term_eq(a.term, b.term, known):
        return False
    if len(a.stack) != len(b.stack):
        return False
    for x, y in zip(a.stack, b.stack):
        if type(x) is not type(y):
            return False
        if isinstance(x, ArgT) and not term_eq(x.term, y.term, known):
            return False
        if isinstance(x, CacheV) and x.name != y.name:
            return False
    if set(a.store.keys()) != set(b.store.keys()):
        return False
    return all(term_eq(t, b.store[x], known) for x, t in a.store.items())


@dataclass
class BisimReport:
    passed: bool
    completed: bool
    steps: int
    rules: List[int]
    rknl_steps: int
    divergence: Optional[str] = None

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        line = f"kl bisimulation: {status} steps={self.steps} rknl_weak_steps={self.rknl_steps}"
        if not self.completed:
            line += " (fuel exhausted)"
        if self.divergence:
            line += f"\n  {self.divergence}"
        return line


def bisim_check(t: Term, fuel: int = Constants.DEFAULT_FUEL) -> BisimReport:
    """
    Run the weak prefix of RKNL (rules 1 to 6) and KL side by side on a
    closed term. Both must fire the same rule and the translated RKNL state
    must equal the KL state after every step. When RKNL forces a suspended
    abstraction it takes rules 3, 2 and 5 where KL takes rule 4 once; the
    three RKNL steps count as one. The prefix must end where KL answers.
    """
    if t.free_vars:
        names = ", ".join(sorted(str(x) for x in t.free_vars))
        raise InvalidInvocation(f"the weak machine needs a closed term, free: {names}")

    machine = Machine()
    kl = KLMachine()
    known = {}
    k = machine.load(t)
    q = kl.load(t)
    report = BisimReport(passed=False, completed=False, steps=0, rules=[], rknl_steps=0)

    def diverged(message):
        report.divergence = message
        logger.info(f"kl bisimulation diverged: {message}")
        return report

    def rknl_step():
        result = machine.step(k)
        if isinstance(result, Transition) and int(result.rule) <= int(Rule.BETA):
            report.rknl_steps += 1
        return result

    try:
        if not kl_config_eq(translate(k), q, known):
            return diverged(f"initial states differ: {translate(k)!r} vs {q!r}")
        while report.steps < fuel:
            result = rknl_step()
            if isinstance(result, Terminal) or int(result.rule) > int(Rule.BETA):
                outcome = kl.step(q)
                if not isinstance(outcome, Answer):
                    return diverged(f"weak prefix ended but KL fired {int(outcome.rule)}")
                report.completed = True
                report.passed = True
                return report

            expected = result.rule
            name = None
            if result.rule is Rule.FORCE and isinstance(result.next.closure.term, Lam):
                k = result.next
                for absorbed in (Rule.ABS, Rule.MEMO):
                    result = rknl_step()
                    if not isinstance(result, Transition) or result.rule is not absorbed:
                        return diverged(f"forcing an abstraction did not continue with rule {int(absorbed)}")
                    k = result.next
                expected = Rule.LOOKUP
            else:
                k = result.next
                if result.rule is Rule.BETA:
                    name = Ident.location(k.store.size - 1)

            outcome = kl.step(q, name=name)
            if isinstance(outcome, Answer):
                return diverged(f"KL answered while RKNL fired {int(expected)}")
            if outcome.rule is not expected:
                return diverged(f"step {report.steps + 1}: RKNL fired {int(expected)}, KL fired {int(outcome.rule)}")
            q = outcome.next
            report.steps += 1
            report.rules.append(int(expected))
            if not kl_config_eq(translate(k), q, known):
                return diverged(f"step {report.steps}: states differ\n  rknl: {translate(k)!r}\n  kl:   {q!r}")
    except RKNLException as e:
        return diverged(f"step {report.steps + 1}: {e}")

    report.passed = True
    return report
