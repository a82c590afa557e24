import pytest
from rknl_machine.common.exception import FuelExhausted
from rknl_machine.core.oracle import (find_redex, is_neutral, is_no_context, is_normal, no_normalize, no_reduce,
                                      no_step, subst)
from rknl_machine.core.syntax import parse, print_term
from rknl_machine.core.term import App, ContextFrame, Ident, Step, Var, alpha_eq, rename_bound, subterm_at, term_eq
from rknl_machine.bench.corpus import enumerate_terms
from rknl_machine.bench.families import church
from . import MachineTest


class TestSubstitution(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_replaces_free_occurrences(self):
        t = subst(parse("f x (g x)"), Ident.source("x"), parse("y"))
        assert (term_eq(t, parse("f y (g y)")))

    def test_stops_at_a_shadowing_binder(self):
        t = parse(r"\x.x")
        assert (subst(t, Ident.source("x"), parse("y")) is t)

    def test_avoids_capture(self):
        t = subst(parse(r"\y.x y"), Ident.source("x"), parse("y"))
        assert (alpha_eq(t, parse(r"\z.y z")))
        assert (Ident.source("y") in t.free_vars)

    def test_commutes_with_alpha_equivalence(self):
        x, y, w = Ident.source("x"), Ident.source("y"), Ident.source("w")
        for s in (parse("y"), parse(r"y x"), self.I):
            for t in enumerate_terms(6, ("x", "y")):
                renamed = rename_bound(t, {y: w})
                assert (alpha_eq(t, renamed))
                assert (alpha_eq(subst(t, x, s), subst(renamed, x, s)))

    def test_renamed_binders_do_not_capture_each_other(self):
        t = subst(parse(r"\y.\y_0.x y y_0"), Ident.source("x"), parse("y y_0"))
        assert (alpha_eq(t, parse(r"\a.\b.(y y_0) a b")))

    def test_deep_term(self):
        f = Ident.source("f")
        t = subst(church(2000).body.body, f, parse("g"))
        assert (term_eq(t, subst(church(2000), f, parse("g")).body.body))
        assert (f not in t.free_vars)
        assert (t.size == church(2000).body.body.size)


class TestNormalOrder(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_finds_the_head_redex_first(self):
        site = find_redex(self.elaborate)
        assert (site.path == ())
        assert (site.binder == Ident.source("x"))

    def test_finds_redex_under_abstraction(self):
        t = parse(r"\y.(\z.z) (f y)")
        site = find_redex(t)
        assert (site.path == (Step.LAM_BODY,))
        assert (term_eq(subterm_at(t, site.path), t.body))

    def test_redex_inside_argument_of_neutral_head(self):
        t = parse(r"c x ((\y.y) z)")
        site = find_redex(t)
        assert (site.path == (Step.APP_RIGHT,))
        assert (term_eq(no_step(t), parse("c x z")))

    def test_normal_forms_have_no_redex(self):
        assert (find_redex(parse(r"\x.c x (\y.y)")) is None)
        assert (no_step(self.c2) is None)

    def test_elaborate_term_takes_five_beta_steps(self):
        result = no_normalize(self.elaborate, 100)
        assert (result.beta_steps == 5)
        assert (print_term(result.normal_form) == r"c (\z.z) (\z.z)")

    def test_reduction_sequence(self):
        reducts = list(no_reduce(parse(r"(\x.x) ((\y.y) z)")))
        assert (len(reducts) == 2)
        assert (term_eq(reducts[-1], parse("z")))

    def test_fuel(self):
        with pytest.raises(FuelExhausted) as context:
            no_normalize(self.Omega, 10)
        assert (context.value.steps == 10)
        assert (alpha_eq(context.value.term, self.Omega))

    def test_neutral_and_normal(self):
        assert (is_neutral(parse("x (\\y.y) z")))
        assert (not is_neutral(parse(r"\y.y")))
        assert (not is_neutral(parse(r"x ((\y.y) z)")))
        assert (is_normal(parse(r"\y.y")))
        assert (not is_normal(self.Omega))

    def test_redex_under_deeply_nested_arguments(self):
        c, z = Var(Ident.source("c")), Var(Ident.source("z"))
        t, expected = App(self.I, z), z
        for _ in range(2000):
            t, expected = App(c, t), App(c, expected)
        site = find_redex(t)
        assert (site.path == (Step.APP_RIGHT,) * 2000)
        result = no_normalize(t, 10)
        assert (result.beta_steps == 1)
        assert (term_eq(result.normal_form, expected))
        assert (is_normal(expected) and is_neutral(expected))
        assert (is_normal(church(2000)))

    def test_every_small_term_reduces_at_an_no_context(self):
        for t in enumerate_terms(7, ("x", "y")):
            site = find_redex(t)
            if site is None:
                assert (is_normal(t))
                continue
            frames = []
            node = t
            for step in site.path:
                if step is Step.APP_LEFT:
                    frames.append(ContextFrame(step, node.arg))
                    node = node.fun
                elif step is Step.APP_RIGHT:
                    frames.append(ContextFrame(step, node.fun))
                    node = node.arg
                else:
                    frames.append(ContextFrame(step, node.binder))
                    node = node.body
            assert (is_no_context(list(reversed(frames))))


class TestNoContext(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_empty_context(self):
        assert (is_no_context([]))

    def test_argument_position_needs_a_neutral_function(self):
        assert (is_no_context([ContextFrame(Step.APP_RIGHT, parse("c x"))]))
        assert (not is_no_context([ContextFrame(Step.APP_RIGHT, self.I)]))
        assert (not is_no_context([ContextFrame(Step.APP_RIGHT, parse(r"c ((\x.x) y)"))]))

    def test_abstraction_is_not_a_function_position(self):
        frames = [ContextFrame(Step.LAM_BODY, Ident.source("x")), ContextFrame(Step.APP_LEFT, self.I)]
        assert (not is_no_context(frames))
        frames = [ContextFrame(Step.APP_LEFT, self.I), ContextFrame(Step.LAM_BODY, Ident.source("x"))]
        assert (is_no_context(frames))
