"""
History-based decoding of RKNL configurations into terms, and the per-step
soundness classifier built on it.

A variable is decoded through the initialization record of its location,
never through the current cell content: an argument location decodes to the
closure it was created with, a rule-7 location to its fresh variable. Every
abstraction met on the way decodes with an overlined binder.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from immutables import Map

from rknl_machine.common.constants import Constants, Rule
from rknl_machine.common.exception import FuelExhausted, IllFormed
from rknl_machine.core.oracle import is_no_context, is_normal, no_normalize, no_step
from rknl_machine.core.syntax import print_term
from rknl_machine.core.term import (ContextFrame, Ident, Lam, Step, Term, Var, alpha_eq, plug, term_eq,
                                    transform)
from rknl_machine.machines.rknl import Arg, Cache, Config, EvalConfig, LApp, LamF, RunResult
from rknl_machine.machines.stack import Stack
from rknl_machine.machines.store import ByRule6, ByRule7, Closure, Location, PlainTerm, StoreView

logger = logging.getLogger(__name__)


class StepKind(Enum):
    OVERHEAD = "overhead"
    ALPHA = "alpha"
    BETA = "beta"
    BYPASS = "bypass"


class Status(Enum):
    OK = "ok"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"


STEP_KINDS = {
    Rule.APP: StepKind.OVERHEAD,
    Rule.ABS: StepKind.OVERHEAD,
    Rule.FORCE: StepKind.OVERHEAD,
    Rule.LOOKUP: StepKind.BYPASS,
    Rule.MEMO: StepKind.OVERHEAD,
    Rule.BETA: StepKind.BETA,
    Rule.NORMALIZE_BODY: StepKind.ALPHA,
    Rule.REUSE: StepKind.BYPASS,
    Rule.ARG_NORMALIZE: StepKind.OVERHEAD,
    Rule.REBUILD_APP: StepKind.OVERHEAD,
    Rule.REBUILD_ABS: StepKind.OVERHEAD,
}


class Decoder:
    """
    Decodes closures, stacks and configurations of one run. Results are
    memoized per location, so shared arguments decode to shared terms.
    """

    def __init__(self, store: StoreView):
        self._store = store
        self._by_location = {}
        self._memo = {}

    def _record(self, location: Location):
        record = self._store.record(location)
        if not isinstance(record, (ByRule6, ByRule7)):
            raise IllFormed(f"environment location {location} was initialized by {record!r}")
        return record

    def _pending(self, c: Closure) -> List[Location]:
        found = []
        for v in c.term.free_vars:
            bound = c.env.get(v)
            if isinstance(bound, Location) and bound.id not in self._by_location:
                found.append(bound)
        return found

    def _resolve(self, c: Closure):
        # decode the argument locations c depends on, dependencies first
        todo = [(location, False) for location in self._pending(c)]
        while todo:
            location, ready = todo.pop()
            if location.id in self._by_location:
                continue
            record = self._record(location)
            if isinstance(record, ByRule7):
                self._by_location[location.id] = Var(record.fresh)
            elif ready:
                self._by_location[location.id] = self._term(record.closure)
            else:
                todo.append((location, True))
                todo.extend((dep, False) for dep in self._pending(record.closure))

    def _variable(self, var: Var, env: Map) -> Term:
        bound = env.get(var.ident)
        if bound is None:
            return var
        if isinstance(bound, Ident):
            return Var(bound)
        return self._by_location[bound.id]

    @staticmethod
    def _binder(lam: Lam, env: Map):
        binder = Ident.overlined(lam.binder.base)
        return binder, env.set(lam.binder, binder)

    def _term(self, c: Closure) -> Term:
        return transform(c.term, c.env, self._variable, self._binder, memo=self._memo)

    def closure(self, c: Closure) -> Term:
        self._resolve(c)
        return self._term(c)

    def value(self, v) -> Term:
        if isinstance(v, PlainTerm):
            return v.term
        return self.closure(Closure(v.lam, v.env))

    def focus(self, k: Config) -> Term:
        if isinstance(k, EvalConfig):
            return self.closure(k.closure)
        return self.value(k.value)

    def stack(self, s: Stack) -> List[ContextFrame]:
        """The decoded context, from the hole outward. Cache frames decode to nothing."""
        frames = []
        for frame in s:
            if isinstance(frame, Arg):
                frames.append(ContextFrame(Step.APP_LEFT, self.closure(frame.closure)))
            elif isinstance(frame, LApp):
                frames.append(ContextFrame(Step.APP_RIGHT, frame.term))
            elif isinstance(frame, LamF):
                frames.append(ContextFrame(Step.LAM_BODY, frame.binder))
            elif not isinstance(frame, Cache):
                raise IllFormed(f"not an RKNL frame: {frame!r}")
        return frames

    def config(self, k: Config) -> Term:
        return plug(self.stack(k.stack), self.focus(k))


def decode_closure(c: Closure, store: StoreView) -> Term:
    return Decoder(store).closure(c)


def decode_stack(s: Stack, store: StoreView) -> List[ContextFrame]:
    return Decoder(store).stack(s)


def decode_config(k: Config) -> Term:
    return Decoder(k.store).config(k)


@dataclass
class Verdict:
    step: int
    rule: Rule
    kind: StepKind
    status: Status
    oracle_steps: int
    before: Term
    after: Term

    def __str__(self):
        line = f"step {self.step} rule {int(self.rule)} {self.kind.value}: {self.status.value}"
        if self.kind in (StepKind.BETA, StepKind.BYPASS):
            line += f" oracle_steps={self.oracle_steps}"
        if self.status is not Status.OK and self.before.size <= 200 and self.after.size <= 200:
            line += f"\n  before: {print_term(self.before)}\n  after:  {print_term(self.after)}"
        return line


def classify_step(k: Config, rule: Rule, k_next: Config, oracle_fuel: int = Constants.DEFAULT_ORACLE_FUEL,
                  step: int = 0, decoder: Decoder = None) -> Verdict:
    """
    Check that one machine step decodes to what its rule promises: the same
    term, an alpha-equivalent term, one normal-order step, or some number of
    normal-order steps skipped by reading the store.
    """
    decoder = decoder if decoder else Decoder(k_next.store)
    rule = Rule(rule)
    kind = STEP_KINDS[rule]
    before, after = decoder.config(k), decoder.config(k_next)
    steps = 0

    if kind is StepKind.OVERHEAD:
        ok = term_eq(before, after)
    elif kind is StepKind.ALPHA:
        ok = alpha_eq(before, after)
    elif kind is StepKind.BETA:
        reduct = no_step(before)
        steps = 1
        ok = reduct is not None and alpha_eq(reduct, after)
    else:
        current = before
        while not alpha_eq(current, after):
            if steps >= oracle_fuel:
                logger.info(f"step {step}: bypass search gave up after {steps} oracle steps")
                return Verdict(step, rule, kind, Status.INCONCLUSIVE, steps, before, after)
            current = no_step(current)
            if current is None:
                break
            steps += 1
        ok = current is not None

    status = Status.OK if ok else Status.FAILED
    if not ok:
        logger.info(f"step {step}: rule {int(rule)} misclassified as {kind.value}")
    return Verdict(step, rule, kind, status, steps, before, after)


@dataclass
class DecodeReport:
    verdicts: List[Verdict] = field(default_factory=list)
    load_ok: bool = False
    unload_ok: Optional[bool] = None
    context_failures: List[int] = field(default_factory=list)
    beta_rules: int = 0
    bypass_steps: int = 0
    oracle_beta: Optional[int] = None

    @property
    def failures(self) -> List[Verdict]:
        return [v for v in self.verdicts if v.status is Status.FAILED]

    @property
    def inconclusive(self) -> List[Verdict]:
        return [v for v in self.verdicts if v.status is Status.INCONCLUSIVE]

    @property
    def accounting_ok(self) -> Optional[bool]:
        """Rule-6 steps plus oracle steps skipped by bypasses against the oracle's own count."""
        if self.oracle_beta is None or self.inconclusive:
            return None
        return self.beta_rules + self.bypass_steps == self.oracle_beta

    @property
    def passed(self) -> bool:
        return (self.load_ok and self.unload_ok is not False and not self.failures
                and not self.context_failures and self.accounting_ok is not False)

    def lines(self) -> List[str]:
        out = [str(v) for v in self.verdicts]
        out.append(f"load: {'ok' if self.load_ok else 'failed'}")
        if self.unload_ok is not None:
            out.append(f"unload: {'ok' if self.unload_ok else 'failed'}")
        for step in self.context_failures:
            out.append(f"step {step}: decoded stack is not a normal-order context")
        if self.oracle_beta is not None:
            status = {True: "ok", False: "failed", None: "inconclusive"}[self.accounting_ok]
            out.append(f"accounting: rule6={self.beta_rules} bypass={self.bypass_steps} "
                       f"oracle_beta={self.oracle_beta} {status}")
        out.append(f"decode: {'pass' if self.passed else 'FAIL'}")
        return out


def verify_run(result: RunResult, oracle_fuel: int = Constants.DEFAULT_ORACLE_FUEL) -> DecodeReport:
    """
    Classify every step of a traced run and check the load and unload
    lemmas. For completed runs the rule-6 steps and the bypassed oracle steps
    must add up to the oracle's beta count on the source term.
    """
    if not result.trace:
        raise IllFormed("decoding needs a run recorded with trace=True")
    decoder = Decoder(result.final.store)
    report = DecodeReport()
    report.load_ok = alpha_eq(decoder.config(result.trace[0].config), result.source)

    for i, entry in enumerate(result.trace):
        if not is_no_context(decoder.stack(entry.config.stack)):
            report.context_failures.append(entry.step)
        if i == 0:
            continue
        verdict = classify_step(result.trace[i - 1].config, entry.rule, entry.config, oracle_fuel,
                                step=entry.step, decoder=decoder)
        report.verdicts.append(verdict)
        if verdict.kind is StepKind.BETA:
            report.beta_rules += 1
        elif verdict.kind is StepKind.BYPASS:
            report.bypass_steps += verdict.oracle_steps

    if result.completed:
        output = decoder.config(result.final)
        report.unload_ok = term_eq(output, result.normal_form) and is_normal(output)
        try:
            fuel = report.beta_rules + report.bypass_steps + oracle_fuel
            report.oracle_beta = no_normalize(result.source, fuel).beta_steps
        except FuelExhausted:
            logger.info("oracle ran out of fuel, accounting left open")

    logger.debug(f"decode verification: {len(report.verdicts)} steps, passed={report.passed}")
    return report
