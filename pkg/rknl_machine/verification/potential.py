"""
Potential function for RKNL and the checks of its amortized step bound.

Every non-beta step strictly decreases the potential of the configuration,
a beta step increases it by less than the potential of the source term, so
a completed run takes at most ``(beta + 1) * phi_term(t0)`` steps.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from rknl_machine.common.constants import Constants, Rule
from rknl_machine.common.exception import IllFormed, SizeOverflow
from rknl_machine.core.term import Term
from rknl_machine.machines.rknl import Arg, Cache, Config, EvalConfig, LApp, LamF, RunResult, TraceEntry
from rknl_machine.machines.stack import Stack
from rknl_machine.machines.store import TODO_EMPTY, AnnotAbs, Done, PlainTerm, TodoClosure

logger = logging.getLogger(__name__)

PHI_VAR = 2
PHI_APP = 3
PHI_LAM = 4
PHI_ARG_FRAME = 2
PHI_FRAME = 1
PHI_ANNOT_CELL = 2


def phi_term(t: Term, limit: Optional[int] = None) -> int:
    """Potential of the unfolded tree of ``t``; sharing does not lower it."""
    phi = PHI_VAR * t.n_vars + PHI_APP * t.n_apps + PHI_LAM * t.n_lams
    if limit is not None and phi > limit:
        raise SizeOverflow(limit=limit)
    return phi


def phi_value(v) -> int:
    if isinstance(v, PlainTerm):
        return 0
    if isinstance(v, AnnotAbs):
        return 1
    raise IllFormed(f"not a value: {v!r}")


def phi_stack(s: Stack) -> int:
    phi = 0
    for frame in s:
        if isinstance(frame, Arg):
            phi += PHI_ARG_FRAME + phi_term(frame.closure.term)
        elif isinstance(frame, (LApp, LamF, Cache)):
            phi += PHI_FRAME
        else:
            raise IllFormed(f"not an RKNL frame: {frame!r}")
    return phi


def phi_store(k: Config) -> int:
    """
    Credits held by the store: suspended arguments not under evaluation, and
    abstractions occurring in ``k`` whose body has not been normalized yet.
    Only locations reachable from the configuration count, each once.
    """
    cached = {frame.location.id for frame in k.stack if isinstance(frame, Cache)}
    seen = set()
    annots = {}
    todo = []

    def visit_env(env):
        todo.extend(env.values())

    def visit_value(v):
        if isinstance(v, AnnotAbs):
            annots[v.annot.id] = v
            todo.append(v.annot)
            visit_env(v.env)

    if isinstance(k, EvalConfig):
        visit_env(k.closure.env)
    else:
        visit_value(k.value)
    for frame in k.stack:
        if isinstance(frame, Arg):
            visit_env(frame.closure.env)
        elif isinstance(frame, Cache):
            todo.append(frame.location)

    phi = 0
    while todo:
        location = todo.pop()
        if location.id in seen:
            continue
        seen.add(location.id)
        cell = k.store.get(location)
        if isinstance(cell, TodoClosure):
            visit_env(cell.closure.env)
            if location.id not in cached:
                phi += phi_term(cell.closure.term)
        elif isinstance(cell, Done):
            visit_value(cell.value)

    for ident, v in annots.items():
        if ident in cached:
            continue
        if k.store.get(v.annot) is TODO_EMPTY:
            phi += PHI_ANNOT_CELL + phi_term(v.body)
    return phi


def phi_focus(k: Config) -> int:
    if isinstance(k, EvalConfig):
        return phi_term(k.closure.term)
    return phi_value(k.value)


def phi_config(k: Config) -> int:
    return phi_focus(k) + phi_stack(k.stack) + phi_store(k)


def potential_series(trace: List[TraceEntry]) -> List[Tuple[int, int]]:
    """``(phi_config, phi_store)`` for every snapshot of a trace."""
    series = []
    for entry in trace:
        store = phi_store(entry.config)
        series.append((phi_focus(entry.config) + phi_stack(entry.config.stack) + store, store))
    return series


@dataclass(frozen=True)
class PotentialRecord:
    step: int
    rule: Optional[Rule]
    phi_config: int
    phi_store: int


@dataclass(frozen=True)
class Violation:
    step: int
    rule: Optional[Rule]
    before: int
    after: int
    reason: str

    def __str__(self):
        rule = int(self.rule) if self.rule is not None else "-"
        return f"step {self.step} rule {rule}: {self.reason} ({self.before} -> {self.after})"


@dataclass
class PotentialReport:
    records: List[PotentialRecord]
    phi_t0: int
    steps: int
    beta_steps: int
    completed: bool
    violations: List[Violation] = field(default_factory=list)
    increases: List[int] = field(default_factory=list)
    non_increasing: bool = True

    @property
    def bound(self) -> int:
        return (self.beta_steps + 1) * self.phi_t0

    @property
    def bilinear_ok(self) -> Optional[bool]:
        return self.steps <= self.bound if self.completed else None

    @property
    def passed(self) -> bool:
        return not self.violations

    def lines(self) -> List[str]:
        out = [str(v) for v in self.violations]
        if self.increases:
            out.append(f"beta steps raising the potential: {', '.join(str(i) for i in self.increases)}")
        if self.non_increasing:
            out.append("potential is non-increasing over the whole run")
        if self.completed:
            out.append(f"bilinear bound: steps={self.steps} <= (beta+1)*phi_t0={self.bound} "
                       f"{'ok' if self.bilinear_ok else 'failed'}")
        out.append(f"potential: {'pass' if self.passed else 'FAIL'}")
        return out


def check_run(result: RunResult, phi_t0: Optional[int] = None) -> PotentialReport:
    """
    Check the decrease and increase lemmas on every step of a traced
    default-variant run, and the bilinear step bound when the run completed.
    """
    if not result.trace:
        raise IllFormed("potential checks need a run recorded with trace=True")
    phi_t0 = phi_term(result.source) if phi_t0 is None else phi_t0
    records = [PotentialRecord(entry.step, entry.rule, phi, store)
               for entry, (phi, store) in zip(result.trace, potential_series(result.trace))]
    report = PotentialReport(records=records, phi_t0=phi_t0, steps=result.steps,
                             beta_steps=result.beta_steps, completed=result.completed)

    for prev, cur in zip(records, records[1:]):
        if cur.phi_config > prev.phi_config:
            report.non_increasing = False
        if cur.rule is Rule.BETA:
            if cur.phi_config > prev.phi_config:
                report.increases.append(cur.step)
            if not prev.phi_config + phi_t0 > cur.phi_config:
                report.violations.append(Violation(cur.step, cur.rule, prev.phi_config, cur.phi_config,
                                                   "beta step raised the potential by phi_t0 or more"))
        elif not cur.phi_config < prev.phi_config:
            report.violations.append(Violation(cur.step, cur.rule, prev.phi_config, cur.phi_config,
                                               "potential did not decrease"))

    if report.bilinear_ok is False:
        report.violations.append(Violation(result.steps, None, report.steps, report.bound,
                                           "step count exceeds the bilinear bound"))
    logger.debug(f"potential check: {len(report.violations)} violations, increases at {report.increases}")
    return report


def emit_potential_csv(report: PotentialReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(Constants.POTENTIAL_CSV_HEADER)
    for record in report.records:
        rule = int(record.rule) if record.rule is not None else ""
        writer.writerow([record.step, rule, record.phi_config, record.phi_store])
    return buffer.getvalue()
