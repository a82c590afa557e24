import pytest
from rknl_machine.common.exception import SizeOverflow
from rknl_machine.core.syntax import parse
from rknl_machine.core.term import (App, ContextFrame, Ident, Lam, Namespace, Step, Var, alpha_eq, context_path,
                                    node_count, plug, rename_bound, replace_at, size, subterm_at, subterms,
                                    term_eq, term_graph)
from . import MachineTest


class TestIdent(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_equality(self):
        assert (Ident.source("x") == Ident.source("x"))
        assert (Ident.source("x") != Ident.overlined("x"))
        assert (Ident.fresh("x", 0) != Ident.fresh("x", 1))

    def test_rendering(self):
        assert (str(Ident.fresh("z", 0)) == "z_0")
        assert (str(Ident.overlined("x")) == "x~")
        assert (str(Ident.location(3)) == "#3")

    def test_only_fresh_names_carry_an_index(self):
        with pytest.raises(ValueError):
            Ident(Namespace.SOURCE, "x", 0)
        with pytest.raises(ValueError):
            Ident(Namespace.FRESH, "x")


class TestTerm(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()

    def test_size_counts_the_unfolded_tree(self):
        shared = App(self.I, self.I)
        assert (size(shared) == 5)
        assert (node_count(shared) == 3)
        assert (node_count(shared) <= size(shared))

    def test_size_limit(self):
        with pytest.raises(SizeOverflow):
            size(self.Omega, limit=5)
        assert (size(self.Omega, limit=100) == 9)

    def test_sharing_is_observationally_a_tree(self):
        d = self.I
        for _ in range(30):
            d = App(d, d)
        assert (size(d) == 2**31 - 1 + 2**30)
        assert (node_count(d) == 32)
        assert (term_eq(d, App(d.fun, d.fun)))
        assert (not term_eq(d, d.fun))

    def test_term_graph_edges(self):
        g = term_graph(self.Omega)
        assert (g.number_of_nodes() == 9)
        keys = {key for _, _, key in g.edges(keys=True)}
        assert (keys == {Step.APP_LEFT, Step.APP_RIGHT, Step.LAM_BODY})

    def test_free_vars(self):
        t = parse(r"\x.x y (\y.z y)")
        assert (t.free_vars == frozenset({Ident.source("y"), Ident.source("z")}))

    def test_structural_and_alpha_equality(self):
        a = parse(r"\x.\y.x y")
        b = parse(r"\u.\v.u v")
        assert (not term_eq(a, b))
        assert (alpha_eq(a, b))
        assert (not alpha_eq(parse(r"\x.\y.x"), parse(r"\x.\y.y")))
        assert (not alpha_eq(parse(r"\x.y"), parse(r"\x.z")))
        assert (alpha_eq(parse(r"\x.\x.x"), parse(r"\y.\z.z")))

    def test_rename_bound(self):
        t = parse(r"\x.\y.x y z")
        renamed = rename_bound(t, {Ident.source("x"): Ident.source("a")})
        assert (term_eq(renamed, parse(r"\a.\y.a y z")))
        assert (alpha_eq(renamed, t))

    def test_proven_pairs_outlive_temporaries(self):
        x, y = Var(Ident.source("x")), Var(Ident.source("y"))
        known = {}
        a, b = App(x, y), App(x, y)
        assert (term_eq(a, b, known))
        del a
        for _ in range(100):
            assert (not term_eq(App(y, x), b, known))

    def test_deep_terms(self):
        t = parse(r"\x." + "x (" * 1999 + "x" + ")" * 1999)
        renamed = rename_bound(t, {Ident.source("x"): Ident.source("a")})
        assert (alpha_eq(renamed, t))
        assert (not term_eq(renamed, t))
        assert (renamed.free_vars == frozenset())

    def test_context_paths(self):
        t = parse(r"\y.(\z.z) (f y)")
        path = (Step.LAM_BODY, Step.APP_RIGHT)
        assert (term_eq(subterm_at(t, path), parse("f y")))
        replaced = replace_at(t, path, Var(Ident.source("w")))
        assert (term_eq(replaced, parse(r"\y.(\z.z) w")))
        assert (term_eq(replace_at(t, path, subterm_at(t, path)), t))

    def test_plug_reads_frames_from_the_hole_outward(self):
        frames = [ContextFrame(Step.APP_LEFT, self.I), ContextFrame(Step.LAM_BODY, Ident.source("x"))]
        t = plug(frames, Var(Ident.source("x")))
        assert (term_eq(t, Lam(Ident.source("x"), App(Var(Ident.source("x")), self.I))))
        assert (context_path(frames) == (Step.LAM_BODY, Step.APP_LEFT))

    def test_subterms_are_node_identities(self):
        assert (id(self.Omega.fun) in subterms(self.Omega))
        assert (id(parse(r"\x.x x")) not in subterms(self.Omega))
