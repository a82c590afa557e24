import pytest
from rknl_machine.common.constants import Rule
from rknl_machine.common.exception import IllFormed, InvalidInvocation, NotWeak, StuckOpen
from rknl_machine.core.syntax import parse, print_term
from rknl_machine.core.term import Ident, term_eq
from rknl_machine.bench.families import FAMILIES, church
from rknl_machine.machines.kl import (Answer, KLMachine, KLMode, bisim_check, kl_config_eq, kl_load, kl_run,
                                      kl_trace_record, rename_free, translate)
from rknl_machine.machines.rknl import Machine
from . import MachineTest, acceptance_corpus

CLOSED_ELABORATE = r"(\x.(\w.w) x x) ((\y.\z.(\w.w) z) ((\x.x x)(\x.x x)))"


class TestKLMachine(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_identity_applied_to_identity(self):
        t = parse(r"(\x.x)(\y.y)")
        result = kl_run(t)
        assert (result.completed)
        assert (result.rules == [1, 2, 6, 4])
        assert (term_eq(result.answer.value, t.arg))
        assert (list(result.answer.store.keys()) == [Ident.location(0)])

    def test_forcing_memoizes(self):
        result = kl_run(parse(r"(\x.x x) ((\y.y)(\z.z))"))
        assert (result.completed)
        assert (result.rules.count(int(Rule.BETA)) == 3)
        assert (result.rules.count(int(Rule.MEMO)) == 2)
        assert (print_term(result.answer.value) == r"\z.z")

    def test_weak_evaluation_stops_at_an_abstraction(self):
        result = kl_run(parse(r"\x.(\y.y) x"))
        assert (result.steps == 1)
        assert (result.rules == [2])

    def test_free_variable_is_stuck(self):
        machine = KLMachine()
        with pytest.raises(StuckOpen):
            machine.step(machine.load(parse("x")))

    def test_supplied_names(self):
        machine = KLMachine()
        q = kl_load(parse(r"(\x.x)(\y.y)"))
        q = machine.step(q).next
        q = machine.step(q).next
        q = machine.step(q, name=Ident.location(5)).next
        assert (Ident.location(5) in q.store)
        assert (q.term.ident == Ident.location(5))

    def test_supplied_names_must_be_unused(self):
        machine = KLMachine()
        q = kl_load(parse(r"(\x.\y.y)(\a.a)(\b.b)"))
        for _ in range(3):
            q = machine.step(q).next
        q = machine.step(q, name=Ident.location(0)).next
        q = machine.step(q).next
        assert (q.mode is KLMode.CONT)
        with pytest.raises(IllFormed):
            machine.step(q, name=Ident.location(0))

    def test_fuel(self):
        result = kl_run(self.Omega, fuel=100)
        assert (not result.completed)
        assert (result.steps == 100)

    def test_trace(self):
        t = parse(r"(\x.x)(\y.y)")
        result = kl_run(t, trace=True)
        assert (len(result.trace) == 5)
        record = kl_trace_record(3, Rule.BETA, result.trace[3])
        assert (record == {"step": 3, "rule": 6, "mode": "eval", "focus": "#0", "stack_depth": 0,
                           "store_size": 1})
        assert (result.trace[-1].mode is KLMode.CONT)
        assert (isinstance(KLMachine().step(result.trace[-1]), Answer))

    def test_rename_free(self):
        x, y = Ident.source("x"), Ident.source("y")
        assert (term_eq(rename_free(parse(r"x (\x.x)"), x, y), parse(r"y (\x.x)")))
        with pytest.raises(IllFormed):
            rename_free(parse(r"\y.x"), x, y)

    def test_rename_free_in_a_deep_term(self):
        f, new = Ident.source("f"), Ident.location(0)
        closed = church(2000)
        assert (rename_free(closed, f, new) is closed)
        body = rename_free(church(2000).body.body, f, new)
        assert (body.free_vars == frozenset({new, Ident.source("x")}))
        assert (body.size == church(2000).body.body.size)


class TestTranslation(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_after_the_first_beta_step(self):
        t = parse(CLOSED_ELABORATE)
        k = Machine().run(t, trace=True).trace[3].config
        machine = KLMachine()
        q = machine.load(t)
        q = machine.step(q).next
        q = machine.step(q).next
        q = machine.step(q, name=Ident.location(1)).next
        assert (kl_config_eq(translate(k), q))
        assert (not kl_config_eq(translate(k), machine.load(t)))

    def test_strong_configurations_do_not_translate(self):
        trace = Machine().run(self.I, trace=True).trace
        assert (translate(trace[0].config).mode is KLMode.EVAL)
        with pytest.raises(NotWeak):
            translate(trace[2].config)


class TestBisimulation(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_identity_applied_to_identity(self):
        report = bisim_check(parse(r"(\x.x)(\y.y)"))
        assert (report.passed and report.completed)
        assert (report.steps == 4)
        assert (report.rules == [1, 2, 6, 4])
        assert (report.rknl_steps == 6)

    def test_closed_elaborate_term(self):
        report = bisim_check(parse(CLOSED_ELABORATE))
        assert (report.passed and report.completed), str(report)

    @pytest.mark.slow
    def test_families(self):
        for fam in FAMILIES.values():
            for n in range(1, 10):
                report = bisim_check(fam.make(n))
                assert (report.passed and report.completed), f"{fam.name} n={n}: {report}"

    def test_open_terms_are_rejected(self):
        with pytest.raises(InvalidInvocation):
            bisim_check(self.elaborate)

    def test_divergent_term(self):
        report = bisim_check(self.Omega, fuel=100)
        assert (report.passed)
        assert (not report.completed)

    @pytest.mark.slow
    def test_random_terms(self):
        checked = 0
        for t, _ in acceptance_corpus():
            if not kl_run(t, fuel=5_000).completed:
                continue
            report = bisim_check(t, fuel=5_001)
            assert (report.passed and report.completed), str(report)
            checked += 1
            if checked == 200:
                break
        assert (checked == 200)
