"""Console script for rknl_machine."""
import json
import logging
import sys
from typing import Optional

import click

from rknl_machine.bench.families import family
from rknl_machine.bench.harness import emit_bench_csv, run_table
from rknl_machine.common.config import Config
from rknl_machine.common.constants import Constants, Engine
from rknl_machine.common.exception import FuelExhausted, InvalidInvocation, RKNLException
from rknl_machine.common.logging import setup_logging
from rknl_machine.core.oracle import no_normalize
from rknl_machine.core.syntax import parse, print_term
from rknl_machine.core.term import Term
from rknl_machine.machines.ghost import lockstep_check
from rknl_machine.machines.kl import KLMachine, bisim_check, kl_trace_record
from rknl_machine.machines.rknl import DEFAULT_OPTIONS, NO8_OPTIONS, Machine, MachineOptions, trace_record
from rknl_machine.verification.decoding import verify_run
from rknl_machine.verification.potential import check_run, emit_potential_csv

logger = logging.getLogger(__name__)

ENGINES = [e.value for e in Engine]
VERIFY_CHECKS = ["decode", "ghost", "kl-bisim", "potential", "bilinear", "all"]


class RKNLGroup(click.Group):
    """
    Runs commands without click's standalone handling so that usage errors
    and command results map onto the documented exit statuses.
    """

    def main(self, *args, **kwargs):
        kwargs.pop("standalone_mode", None)
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            rv = Constants.EXIT_USAGE
        except click.ClickException as e:
            e.show()
            rv = Constants.EXIT_USAGE
        sys.exit(rv if isinstance(rv, int) else Constants.EXIT_OK)


def term_options(f):
    f = click.option("--n", "n", type=int, help="Family parameter, used with --family")(f)
    f = click.option("--family", "family_name", type=str, help="Benchmark family name, e.g. cn_dub_I")(f)
    f = click.option("--file", "path", type=click.Path(exists=True, dir_okay=False),
                     help="Read the term from a file")(f)
    f = click.option("--term", "text", type=str, help="Term in concrete syntax")(f)
    return f


def fuel_option(f):
    return click.option("--fuel", "fuel", type=int, help="Maximum number of machine steps",
                        default=None, show_default=str(Constants.DEFAULT_FUEL))(f)


def out_option(f):
    return click.option("--out", "out", type=click.Path(dir_okay=False),
                        help="Write the output to this file instead of standard output")(f)


def load_term(text: Optional[str], path: Optional[str], family_name: Optional[str], n: Optional[int]) -> Term:
    sources = [s for s in (text, path, family_name) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("give exactly one of --term, --file or --family")
    if family_name is not None:
        if n is None:
            raise click.UsageError("--family needs --n")
        return family(family_name).make(n)
    if n is not None:
        raise click.UsageError("--n is only used with --family")
    if path is not None:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    return parse(text)


def require_closed(t: Term):
    if t.free_vars:
        names = ", ".join(sorted(str(x) for x in t.free_vars))
        raise InvalidInvocation(f"engine kl needs a closed term, free variables: {names}")


def machine_options(engine: Engine, config: Config) -> MachineOptions:
    no8 = engine is Engine.RKNL_NO8
    if config.max_fresh_index == Constants.MAX_FRESH_INDEX:
        return NO8_OPTIONS if no8 else DEFAULT_OPTIONS
    return MachineOptions(no8=no8, max_fresh_index=config.max_fresh_index)


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


def fail(message: str, code: int) -> int:
    click.echo(f"Error: {message}", err=True)
    return code


def _guarded(command):
    """Maps library errors of a command body onto exit statuses."""
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except FuelExhausted as e:
            return fail(str(e), Constants.EXIT_FUEL)
        except RKNLException as e:
            return fail(str(e), Constants.EXIT_USAGE)
        except OSError as e:
            return fail(str(e), Constants.EXIT_USAGE)
        except RecursionError:
            return fail("input is nested too deeply", Constants.EXIT_USAGE)
    wrapper.__name__ = command.__name__
    wrapper.__doc__ = command.__doc__
    return wrapper


@click.group(cls=RKNLGroup, help="Strong call-by-need normalization with the RKNL abstract machine")
def main():
    setup_logging()


@main.command(help="Normalize a term and print its normal form")
@click.option("--engine", "engine", type=click.Choice(ENGINES), default=Engine.RKNL.value, show_default=True,
              help="Evaluation strategy")
@term_options
@fuel_option
@click.option("--trace", "trace", is_flag=True, help="Write a JSON-lines trace to --out or standard error")
@out_option
@_guarded
def normalize(engine, text, path, family_name, n, fuel, trace, out):
    config = Config(fuel=fuel)
    engine = Engine(engine)
    t = load_term(text, path, family_name, n)

    if engine is Engine.NO:
        result = no_normalize(t, config.fuel)
        click.echo(print_term(result.normal_form, config.style))
        click.echo(f"steps={result.beta_steps} beta={result.beta_steps}")
        return Constants.EXIT_OK

    if engine is Engine.KL:
        require_closed(t)
        kl = KLMachine().run(t, fuel=config.fuel, trace=trace)
        if trace:
            records = [kl_trace_record(i, rule, q, config.style)
                       for i, (rule, q) in enumerate(zip(kl.rules, kl.trace[1:]), 1)]
            _write_trace(records, out)
        if not kl.completed:
            return fail(f"fuel exhausted after {kl.steps} steps", Constants.EXIT_FUEL)
        click.echo(print_term(kl.answer.value, config.style))
        click.echo(f"steps={kl.steps} beta={kl.rules.count(6)}")
        return Constants.EXIT_OK

    result = Machine(machine_options(engine, config)).run(t, fuel=config.fuel, trace=trace)
    if trace:
        _write_trace([trace_record(e, config.style) for e in result.trace[1:]], out)
    if not result.completed:
        return fail(f"fuel exhausted after {result.steps} steps (beta={result.beta_steps})", Constants.EXIT_FUEL)
    click.echo(print_term(result.normal_form, config.style))
    click.echo(f"steps={result.steps} beta={result.beta_steps}")
    return Constants.EXIT_OK


def _write_trace(records, out: Optional[str]):
    lines = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
    if out:
        emit(lines, out)
    else:
        click.echo(lines, nl=False, err=True)


@main.command(help="Print the JSON-lines trace of a run")
@click.option("--engine", "engine", type=click.Choice([e.value for e in Engine if e is not Engine.NO]),
              default=Engine.RKNL.value, show_default=True, help="Machine to trace")
@term_options
@fuel_option
@out_option
@_guarded
def trace(engine, text, path, family_name, n, fuel, out):
    config = Config(fuel=fuel)
    engine = Engine(engine)
    t = load_term(text, path, family_name, n)
    if engine is Engine.KL:
        require_closed(t)
        kl = KLMachine().run(t, fuel=config.fuel, trace=True)
        records = [kl_trace_record(i, rule, q, config.style)
                   for i, (rule, q) in enumerate(zip(kl.rules, kl.trace[1:]), 1)]
        completed = kl.completed
    else:
        result = Machine(machine_options(engine, config)).run(t, fuel=config.fuel, trace=True)
        records = [trace_record(e, config.style) for e in result.trace[1:]]
        completed = result.completed
    emit("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), out)
    if not completed:
        return fail("fuel exhausted", Constants.EXIT_FUEL)
    return Constants.EXIT_OK


@main.command(help="Write the potential series of a run as CSV. A run that exhausts its fuel still exits 0 "
                   "with the series of its prefix; exit 3 means a potential lemma failed")
@term_options
@fuel_option
@out_option
@_guarded
def potential(text, path, family_name, n, fuel, out):
    config = Config(fuel=fuel)
    t = load_term(text, path, family_name, n)
    result = Machine(machine_options(Engine.RKNL, config)).run(t, fuel=config.fuel, trace=True)
    report = check_run(result)
    emit(emit_potential_csv(report), out)
    for line in report.violations:
        click.echo(str(line), err=True)
    return Constants.EXIT_OK if report.passed else Constants.EXIT_VERIFY


@main.command(help="Reproduce the table of execution lengths as CSV")
@click.option("--family", "family_name", type=str, help="Restrict the table to one family")
@click.option("--n", "n", type=int, help="Restrict the table to one n")
@fuel_option
@out_option
@_guarded
def bench(family_name, n, fuel, out):
    config = Config(fuel=fuel)
    n_lo, n_hi = (n, n) if n is not None else (Constants.BENCH_MIN_N, Constants.BENCH_MAX_N)
    families = [family_name] if family_name else None
    rows = run_table(n_lo, n_hi, families=families, config=config)
    emit(emit_bench_csv(rows), out)
    if any(r.match is False for r in rows):
        return fail("measured step counts differ from the closed forms", Constants.EXIT_VERIFY)
    return Constants.EXIT_OK


@main.command(help="Run verification checks: decode, ghost, kl-bisim, potential, bilinear or all. "
                   "Checks run on the prefix that fits in the fuel, so a run that exhausts its fuel "
                   "exits 0 when that prefix passes")
@click.argument("check", type=click.Choice(VERIFY_CHECKS))
@term_options
@fuel_option
@_guarded
def verify(check, text, path, family_name, n, fuel):
    config = Config(fuel=fuel)
    t = load_term(text, path, family_name, n)
    checks = VERIFY_CHECKS[:-1] if check == "all" else [check]
    passed = True
    result = None
    if {"decode", "potential", "bilinear"} & set(checks):
        result = Machine(machine_options(Engine.RKNL, config)).run(t, fuel=config.fuel, trace=True)

    for name in checks:
        if name == "decode":
            report = verify_run(result, config.oracle_fuel)
            lines, ok = report.lines(), report.passed
        elif name == "ghost":
            report = lockstep_check(t, config.fuel, machine_options(Engine.RKNL, config))
            lines, ok = [str(report)], report.passed
        elif name == "kl-bisim":
            if t.free_vars:
                if check == "all":
                    click.echo("kl bisimulation: skipped, term is open")
                    continue
                require_closed(t)
            report = bisim_check(t, config.fuel)
            lines, ok = [str(report)], report.passed
        elif name == "potential":
            report = check_run(result)
            lines, ok = report.lines(), report.passed
        else:
            report = check_run(result)
            if report.bilinear_ok is None:
                lines, ok = ["bilinear: skipped, run did not complete"], True
            else:
                lines = [f"bilinear: steps={report.steps} beta={report.beta_steps} phi_t0={report.phi_t0} "
                         f"bound={report.bound} {'pass' if report.bilinear_ok else 'FAIL'}"]
                ok = report.bilinear_ok
        for line in lines:
            click.echo(line)
        passed = passed and ok

    return Constants.EXIT_OK if passed else Constants.EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())  # pragma: no cover
