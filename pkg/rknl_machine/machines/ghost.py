"""
The RKNLi ghost machine: RKNL with its shape invariant made explicit.

Normal forms are split into neutral terms (``GVar``, ``GApp``) and normal
terms (``GLam``, ``Coerce``), stacks into potentially applicative stacks
(mode ``GContPi``) and non-applicative stacks (mode ``GContRho``), and the
store into argument cells (``sigma``) and annotation cells (``sigma_annot``).
A configuration that fits none of the ghost rules is a shape violation.

Running the ghost machine next to RKNL and comparing projections after every
step checks that every reachable RKNL configuration has the expected shape.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Union

from immutables import Map

from rknl_machine.common.constants import Constants, GhostRule
from rknl_machine.common.exception import IllFormed, ShapeViolation
from rknl_machine.core.oracle import is_no_context
from rknl_machine.core.term import (App, ContextFrame, Ident, Lam, Step, Term, Var, term_eq)
from rknl_machine.machines.rknl import (DEFAULT_OPTIONS, Arg, Cache, Config, ContConfig, EvalConfig, LApp, LamF,
                                        Machine, MachineOptions, Terminal, config_eq, fresh_idents)
from rknl_machine.machines.stack import EMPTY_STACK, Stack
from rknl_machine.machines.store import (EMPTY_ENV, TODO_EMPTY, AnnotAbs, Closure, Done, FreshNames,
                                         FrozenStore, Location, LocationKind, PlainTerm, TodoClosure)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GVar:
    ident: Ident


@dataclass(frozen=True, eq=False)
class GApp:
    fun: "GNeutral"
    arg: "GNormal"


@dataclass(frozen=True, eq=False)
class GLam:
    binder: Ident
    body: "GNormal"


@dataclass(frozen=True, eq=False)
class Coerce:
    neutral: "GNeutral"


GNeutral = Union[GVar, GApp]
GNormal = Union[GLam, Coerce]
GValue = Union[GVar, GApp, AnnotAbs]


class _CoerceFrame:
    def __repr__(self):
        return "CoerceFrame"


COERCE_FRAME = _CoerceFrame()


@dataclass(frozen=True)
class GLApp:
    neutral: GNeutral


@dataclass(frozen=True)
class GEval:
    closure: Closure
    stack: Stack
    sigma: Map
    sigma_annot: Map


@dataclass(frozen=True)
class GContPi:
    value: GValue
    stack: Stack
    sigma: Map
    sigma_annot: Map


@dataclass(frozen=True)
class GContRho:
    normal: GNormal
    stack: Stack
    sigma: Map
    sigma_annot: Map


GConfig = Union[GEval, GContPi, GContRho]


@dataclass(frozen=True)
class GhostTransition:
    next: GConfig
    rule: GhostRule


@dataclass(frozen=True)
class GhostTerminal:
    normal: GNormal


class Eraser:
    """Maps ghost terms to terms, dropping coercions. Shared ghost nodes stay shared."""

    def __init__(self):
        self._memo = {}

    def __call__(self, g) -> Term:
        out = []
        todo = [(g, False)]
        while todo:
            node, ready = todo.pop()
            if not ready:
                hit = self._memo.get(id(node))
                if hit is not None:
                    out.append(hit[1])
                    continue
                if isinstance(node, GVar):
                    result = Var(node.ident)
                else:
                    todo.append((node, True))
                    if isinstance(node, GApp):
                        todo.append((node.arg, False))
                        todo.append((node.fun, False))
                    else:
                        todo.append((node.body if isinstance(node, GLam) else node.neutral, False))
                    continue
            elif isinstance(node, GApp):
                arg = out.pop()
                result = App(out.pop(), arg)
            elif isinstance(node, GLam):
                result = Lam(node.binder, out.pop())
            else:
                result = out.pop()
            self._memo[id(node)] = (node, result)
            out.append(result)
        return out[0]


def is_neutral_ghost(g) -> bool:
    return isinstance(g, (GVar, GApp))


class GhostMachine:
    def __init__(self, max_fresh_index: int = Constants.MAX_FRESH_INDEX):
        self._max_fresh_index = max_fresh_index
        self._names = FreshNames(limit=max_fresh_index)

    def load(self, t: Term) -> GEval:
        self._names = FreshNames(reserved=fresh_idents(t), limit=self._max_fresh_index)
        return GEval(Closure(t, EMPTY_ENV), EMPTY_STACK.push(COERCE_FRAME), Map(), Map())

    @staticmethod
    def _next_location(g: GConfig, kind: LocationKind) -> Location:
        return Location(len(g.sigma) + len(g.sigma_annot), kind)

    def step(self, g: GConfig) -> Union[GhostTransition, GhostTerminal]:
        sigma, annot = g.sigma, g.sigma_annot
        top = g.stack.top
        rest = g.stack.rest

        match g:
            case GEval(closure=Closure(term=App(fun=t1, arg=t2), env=e)):
                return GhostTransition(GEval(Closure(t1, e), g.stack.push(Arg(Closure(t2, e))), sigma, annot),
                                       GhostRule.APP)

            case GEval(closure=Closure(term=Lam() as lam, env=e)):
                location = self._next_location(g, LocationKind.ANNOT)
                return GhostTransition(GContPi(AnnotAbs(lam, e, location), g.stack, sigma,
                                               annot.set(location, TODO_EMPTY)), GhostRule.ABS)

            case GEval(closure=Closure(term=Var(ident=x), env=e)):
                location = e.get(x)
                if location is None:
                    return GhostTransition(GContPi(GVar(x), g.stack, sigma, annot), GhostRule.LOOKUP)
                match sigma.get(location):
                    case TodoClosure(closure=c):
                        return GhostTransition(GEval(c, g.stack.push(Cache(location)), sigma, annot),
                                               GhostRule.FORCE)
                    case Done(value=v):
                        return GhostTransition(GContPi(v, g.stack, sigma, annot), GhostRule.LOOKUP)
                raise ShapeViolation(f"variable {x} is not bound to an argument cell")

            case GContPi(value=v):
                if isinstance(top, Cache) and top.location.kind is LocationKind.ARG:
                    return GhostTransition(GContPi(v, rest, sigma.set(top.location, Done(v)), annot),
                                           GhostRule.MEMO)
                if isinstance(v, AnnotAbs) and isinstance(top, Arg):
                    location = self._next_location(g, LocationKind.ARG)
                    body = Closure(v.body, v.env.set(v.binder, location))
                    return GhostTransition(GEval(body, rest, sigma.set(location, TodoClosure(top.closure)), annot),
                                           GhostRule.BETA)
                if isinstance(v, AnnotAbs) and top is COERCE_FRAME:
                    cell = annot.get(v.annot)
                    if cell is TODO_EMPTY:
                        fresh = self._names(v.binder)
                        location = self._next_location(g, LocationKind.ARG)
                        body = Closure(v.body, v.env.set(v.binder, location))
                        stack = rest.push(Cache(v.annot)).push(LamF(fresh)).push(COERCE_FRAME)
                        return GhostTransition(GEval(body, stack, sigma.set(location, Done(GVar(fresh))), annot),
                                               GhostRule.NORMALIZE_BODY)
                    if isinstance(cell, Done):
                        return GhostTransition(GContRho(cell.value, rest, sigma, annot), GhostRule.REUSE)
                if is_neutral_ghost(v) and isinstance(top, Arg):
                    return GhostTransition(GEval(top.closure, rest.push(GLApp(v)).push(COERCE_FRAME), sigma, annot),
                                           GhostRule.ARG_NORMALIZE)
                if is_neutral_ghost(v) and top is COERCE_FRAME:
                    return GhostTransition(GContRho(Coerce(v), rest, sigma, annot), GhostRule.COERCE)

            case GContRho(normal=n):
                if not g.stack:
                    return GhostTerminal(n)
                if isinstance(top, Cache) and top.location.kind is LocationKind.ANNOT:
                    return GhostTransition(GContRho(n, rest, sigma, annot.set(top.location, Done(n))),
                                           GhostRule.MEMO_NORMAL)
                if isinstance(top, GLApp):
                    return GhostTransition(GContPi(GApp(top.neutral, n), rest, sigma, annot),
                                           GhostRule.REBUILD_APP)
                if isinstance(top, LamF):
                    return GhostTransition(GContRho(GLam(top.binder, n), rest, sigma, annot),
                                           GhostRule.REBUILD_ABS)

        raise ShapeViolation(f"{type(g).__name__} with top frame {top!r}")


def _project_value(v, erase: Eraser):
    if isinstance(v, AnnotAbs):
        return v
    return PlainTerm(erase(v))


def _project_frame(frame, erase: Eraser):
    if isinstance(frame, GLApp):
        return LApp(erase(frame.neutral))
    return frame


def project(g: GConfig, erase: Eraser = None) -> Config:
    """
    The RKNL configuration a ghost configuration stands for: coercion
    frames dropped, ghost terms erased, the two stores merged by location id.
    """
    erase = erase if erase else Eraser()
    frames = [_project_frame(f, erase) for f in g.stack if f is not COERCE_FRAME]
    stack = Stack.of(frames)
    contents = {}
    for location, cell in list(g.sigma.items()) + list(g.sigma_annot.items()):
        if isinstance(cell, Done):
            cell = Done(_project_value(cell.value, erase))
        contents[location.id] = (location, cell)
    store = FrozenStore(contents)
    if isinstance(g, GEval):
        return EvalConfig(g.closure, stack, store)
    if isinstance(g, GContPi):
        return ContConfig(_project_value(g.value, erase), stack, store)
    return ContConfig(PlainTerm(erase(g.normal)), stack, store)


def stack_is_no_context(stack: Stack) -> bool:
    """Whether an RKNL stack, Cache frames dropped, is a normal-order context."""
    frames = []
    for frame in stack:
        if isinstance(frame, Arg):
            frames.append(ContextFrame(Step.APP_LEFT, frame.closure.term))
        elif isinstance(frame, LApp):
            frames.append(ContextFrame(Step.APP_RIGHT, frame.term))
        elif isinstance(frame, LamF):
            frames.append(ContextFrame(Step.LAM_BODY, frame.binder))
        elif not isinstance(frame, Cache):
            raise IllFormed(f"not an RKNL frame: {frame!r}")
    return is_no_context(frames)


def stack_decodes_to_no_context(g: GConfig, erase: Eraser = None) -> bool:
    return stack_is_no_context(project(g, erase).stack)


@dataclass
class LockstepReport:
    passed: bool
    completed: bool
    rknl_steps: int
    ghost_steps: int
    silent_steps: int
    rules: List[str]
    divergence: Optional[str] = None

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        line = (f"ghost lockstep: {status} rknl_steps={self.rknl_steps} ghost_steps={self.ghost_steps} "
                f"silent={self.silent_steps}")
        if not self.completed:
            line += " (fuel exhausted)"
        if self.divergence:
            line += f"\n  {self.divergence}"
        return line


def lockstep_check(t: Term, fuel: int = Constants.DEFAULT_FUEL,
                   opts: MachineOptions = DEFAULT_OPTIONS) -> LockstepReport:
    """
    Run RKNL and the ghost machine side by side. After every RKNL step the
    ghost takes its silent coercion steps and then the matching step; the
    projection of the ghost configuration must equal the RKNL configuration.
    Every ghost stack must decode to a normal-order context. Both machines
    draw fresh names under the limit of ``opts``.
    """
    machine = Machine(opts)
    ghost = GhostMachine(opts.max_fresh_index)
    erase = Eraser()
    known = {}
    k = machine.load(t)
    g = ghost.load(t)
    report = LockstepReport(passed=False, completed=False, rknl_steps=0, ghost_steps=0, silent_steps=0,
                            rules=[])

    def diverged(message):
        report.divergence = message
        logger.info(f"ghost lockstep diverged: {message}")
        return report

    def check(step_no):
        if not config_eq(k, project(g, erase), known):
            return f"step {step_no}: projection differs\n  rknl:  {k!r}\n  ghost: {project(g, erase)!r}"
        if not stack_decodes_to_no_context(g, erase):
            return f"step {step_no}: stack is not a normal-order context: {g.stack!r}"
        return None

    problem = check(0)
    if problem:
        return diverged(problem)

    try:
        while report.rknl_steps < fuel:
            result = machine.step(k)
            gresult = ghost.step(g)
            while isinstance(gresult, GhostTransition) and gresult.rule is GhostRule.COERCE:
                g = gresult.next
                report.ghost_steps += 1
                report.silent_steps += 1
                report.rules.append(gresult.rule.value)
                if not stack_decodes_to_no_context(g, erase):
                    return diverged(f"after silent step: stack is not a normal-order context: {g.stack!r}")
                gresult = ghost.step(g)

            if isinstance(result, Terminal):
                if not isinstance(gresult, GhostTerminal):
                    return diverged(f"rknl terminated but ghost fired {gresult.rule.value}")
                if not term_eq(result.term, erase(gresult.normal), known):
                    return diverged("terminal outputs differ")
                report.completed = True
                report.passed = True
                return report
            if isinstance(gresult, GhostTerminal):
                return diverged(f"ghost terminated but rknl fired {int(result.rule)}")
            if gresult.rule.projected != int(result.rule):
                return diverged(f"step {report.rknl_steps + 1}: rknl fired {int(result.rule)}, "
                                f"ghost fired {gresult.rule.value}")

            k, g = result.next, gresult.next
            report.rknl_steps += 1
            report.ghost_steps += 1
            report.rules.append(gresult.rule.value)
            problem = check(report.rknl_steps)
            if problem:
                return diverged(problem)
    except ShapeViolation as e:
        return diverged(f"step {report.rknl_steps + 1}: {e}")

    report.passed = True
    return report
