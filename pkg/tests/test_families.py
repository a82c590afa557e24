import pytest
from rknl_machine.common.config import Config
from rknl_machine.common.constants import Constants, Engine
from rknl_machine.common.exception import InvalidInvocation, OutOfRange
from rknl_machine.core.oracle import is_normal, no_normalize
from rknl_machine.core.syntax import print_term
from rknl_machine.core.term import alpha_eq
from rknl_machine.bench.corpus import enumerate_terms, random_closed_terms
from rknl_machine.bench.families import (FAMILIES, church, cps_chain, expected_kn, expected_steps, family, make)
from rknl_machine.bench.harness import emit_bench_csv, implosion_profile, measure, run_table
from rknl_machine.machines.rknl import Machine
from . import MachineTest


class TestFamilies(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_church_numerals(self):
        assert (print_term(church(0)) == r"\f.\x.x")
        assert (print_term(church(3)) == r"\f.\x.f (f (f x))")

    def test_cps_chain(self):
        assert (print_term(cps_chain(0)) == r"\x.x")
        assert (print_term(cps_chain(1)) == r"\v.(\x.\k.k (\f.f x x)) v (\x.x)")

    def test_generated_terms_are_closed(self):
        for fam in FAMILIES.values():
            for n in range(0, 4):
                assert (not fam.make(n).free_vars)

    def test_closed_forms(self):
        assert (expected_steps("cn_c2_I", Engine.RKNL, 9) == 5170)
        assert (expected_steps("cn_c2_I", Engine.RKNL, 1) == 30)
        assert (expected_steps("pred_cn", Engine.NO, 4) == 32)
        assert (expected_steps("cn_dub_I", Engine.RKNL_NO8, 3) == 142)
        assert (expected_steps("cn_dub_I", Engine.RKNL_NO8, 2) == 73)
        assert (expected_steps("cn_dub_I", Engine.RKNL, 2) == 51)
        assert (expected_steps("lam_cn_omega", Engine.RKNL, 4) == 51)
        assert (expected_kn("cn_c2_I", 1) == 24)

    def test_range(self):
        with pytest.raises(OutOfRange):
            expected_steps("dn_I", Engine.RKNL, 0)
        with pytest.raises(OutOfRange):
            expected_kn("dn_I", 10)
        with pytest.raises(OutOfRange):
            make("dn_I", -1)

    def test_unknown_family(self):
        with pytest.raises(InvalidInvocation):
            family("cn_missing")

    def test_normal_forms_agree_with_normal_order(self):
        for name in FAMILIES:
            t = make(name, 3)
            expected = no_normalize(t, 1000).normal_form
            result = Machine().run(t)
            assert (result.steps == measure(family(name), Engine.RKNL, 3, Config()))
            assert (is_normal(expected))
            assert (alpha_eq(result.normal_form, expected))


class TestBench(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_full_table(self):
        rows = run_table()
        assert (len(rows) == 6 * 9 * 4)
        measured = [r for r in rows if r.engine != "kn"]
        assert (all(r.match is True for r in measured)), [r for r in measured if r.match is not True]
        kn = [r for r in rows if r.engine == "kn"]
        assert (all(r.measured is None and r.match == Constants.KN_MATCH for r in kn))

    def test_csv(self):
        rows = run_table(2, 2, families=["cn_dub_I"])
        lines = emit_bench_csv(rows).splitlines()
        assert (lines == ["family,n,engine,measured,expected,match",
                          "cn_dub_I,2,no,5,5,true",
                          "cn_dub_I,2,rknl,51,51,true",
                          "cn_dub_I,2,rknl-no8,73,73,true",
                          f'cn_dub_I,2,kn,,78,"{Constants.KN_MATCH}"'])

    def test_fuel_shortfall_is_a_mismatch(self):
        rows = run_table(3, 3, families=["lam_cn_omega"], config=Config(fuel=10), kn=False)
        machine_rows = [r for r in rows if r.engine != Engine.NO.value]
        assert (all(r.measured is None and r.match is False for r in machine_rows))

    def test_implosion_profile(self):
        rows = implosion_profile("cn_dub_I", 1, 6)
        for row in rows:
            assert (row.rknl_steps == 18 * row.n + 15)
            assert (row.beta_steps == 2**row.n + 1)
            assert (row.size == 6 * 2**row.n - 4)
            assert (row.node_count <= 8 * row.n + 2)
        assert (rows[-1].node_count < rows[-1].size)

    def test_shared_result_grows_linearly(self):
        rows = implosion_profile("lam_cn_omega", 1, 9)
        for row in rows:
            assert (row.rknl_steps == 9 * row.n + 15)
            assert (row.beta_steps == 2**row.n + 1)
        middle = [r for r in rows if 3 <= r.n <= 8]
        steps = [b.node_count - a.node_count for a, b in zip(middle, middle[1:])]
        assert (len(set(steps)) == 1)
        assert (all(b.size >= 2 * a.size for a, b in zip(middle, middle[1:])))


class TestCorpus(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_enumeration_count(self):
        assert (sum(1 for _ in enumerate_terms(7, ("x", "y"))) == 2874)
        assert (sum(1 for _ in enumerate_terms(1)) == 2)

    def test_random_terms_are_closed_and_reproducible(self):
        a = random_closed_terms(3, 50, 12)
        b = random_closed_terms(3, 50, 12)
        for x, y in zip(a, b):
            assert (not x.free_vars)
            assert (2 <= x.size <= 12)
            assert (print_term(x) == print_term(y))
