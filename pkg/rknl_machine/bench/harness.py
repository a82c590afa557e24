"""
Runs the families against the closed forms and renders the table as CSV.
"""

import csv
import io
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Union

from rknl_machine.common.config import Config
from rknl_machine.common.constants import Constants, Engine
from rknl_machine.common.exception import FuelExhausted
from rknl_machine.core.oracle import no_normalize
from rknl_machine.core.term import node_count
from rknl_machine.bench.families import FAMILIES, Family, family
from rknl_machine.machines.rknl import DEFAULT_OPTIONS, NO8_OPTIONS, Machine

logger = logging.getLogger(__name__)

MEASURED_ENGINES = (Engine.NO, Engine.RKNL, Engine.RKNL_NO8)


@dataclass(frozen=True)
class BenchRow:
    family: str
    n: int
    engine: str
    measured: Optional[int]
    expected: int
    match: Union[bool, str]

    def as_csv(self) -> list:
        measured = "" if self.measured is None else self.measured
        match = self.match if isinstance(self.match, str) else str(self.match).lower()
        return [self.family, self.n, self.engine, measured, self.expected, match]


@dataclass(frozen=True)
class ImplosionRow:
    n: int
    rknl_steps: int
    beta_steps: int
    node_count: int
    size: int


def measure(fam: Family, engine: Engine, n: int, config: Config) -> Optional[int]:
    """
    Beta steps of normal order, or machine steps of an RKNL variant; None
    when the run does not finish within its fuel.
    """
    t = fam.make(n)
    if engine is Engine.NO:
        fuel = 2 * fam.expected(engine, n) + config.bench_slack
        try:
            return no_normalize(t, fuel).beta_steps
        except FuelExhausted as e:
            logger.warning(f"{fam.name} n={n}: oracle ran out of fuel after {e.steps} steps")
            return None
    options = NO8_OPTIONS if engine is Engine.RKNL_NO8 else DEFAULT_OPTIONS
    result = Machine(options).run(t, fuel=config.fuel)
    return result.steps if result.completed else None


def run_table(n_lo: int = Constants.BENCH_MIN_N, n_hi: int = Constants.BENCH_MAX_N,
              families: Iterable[str] = None, config: Config = None, kn: bool = True) -> List[BenchRow]:
    config = config if config else Config()
    names = list(families) if families else list(FAMILIES)
    rows = []
    for name in names:
        fam = family(name)
        for n in range(n_lo, n_hi + 1):
            for engine in MEASURED_ENGINES:
                expected = fam.expected(engine, n)
                measured = measure(fam, engine, n, config)
                rows.append(BenchRow(name, n, engine.value, measured, expected, measured == expected))
            if kn:
                rows.append(BenchRow(name, n, "kn", None, fam.expected_kn(n), Constants.KN_MATCH))
    mismatches = [r for r in rows if r.match is False]
    logger.info(f"bench: {len(rows)} rows, {len(mismatches)} mismatches")
    return rows


def emit_bench_csv(rows: Iterable[BenchRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(Constants.BENCH_CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buffer.getvalue()


def implosion_profile(name: str, n_lo: int, n_hi: int, config: Config = None) -> List[ImplosionRow]:
    """RKNL steps, oracle beta steps and the size of the shared and unfolded RKNL result per n."""
    config = config if config else Config()
    fam = family(name)
    rows = []
    for n in range(n_lo, n_hi + 1):
        result = Machine().run(fam.make(n), fuel=config.fuel)
        beta = measure(fam, Engine.NO, n, config)
        normal_form = result.normal_form
        rows.append(ImplosionRow(n, result.steps, beta, node_count(normal_form), normal_form.size))
    return rows
