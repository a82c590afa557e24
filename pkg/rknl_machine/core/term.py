"""
Lambda terms with structural sharing.

Nodes are immutable and compared by identity; :func:`term_eq` is the
structural comparison and :func:`alpha_eq` the comparison up to renaming of
bound variables. A node may be referenced from several parents, so a term is
a DAG that behaves like its unfolded tree.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import networkx as nx
from immutables import Map

from rknl_machine.common.exception import SizeOverflow

logger = logging.getLogger(__name__)


class Namespace(Enum):
    SOURCE = "source"
    OVERLINED = "overlined"
    FRESH = "fresh"
    LOCATION = "location"


@dataclass(frozen=True)
class Ident:
    namespace: Namespace
    base: str
    index: Optional[int] = None

    def __post_init__(self):
        if self.namespace is Namespace.FRESH:
            if self.index is None or self.index < 0:
                raise ValueError(f"fresh identifier {self.base} needs a non-negative index")
        elif self.index is not None:
            raise ValueError(f"only fresh identifiers carry an index, got {self.base}/{self.index}")

    @classmethod
    def source(cls, name: str) -> "Ident":
        return cls(Namespace.SOURCE, name)

    @classmethod
    def fresh(cls, base: str, index: int) -> "Ident":
        return cls(Namespace.FRESH, base, index)

    @classmethod
    def overlined(cls, base: str) -> "Ident":
        return cls(Namespace.OVERLINED, base)

    @classmethod
    def location(cls, name: Union[str, int]) -> "Ident":
        return cls(Namespace.LOCATION, str(name))

    def __str__(self):
        if self.namespace is Namespace.FRESH:
            return f"{self.base}_{self.index}"
        if self.namespace is Namespace.OVERLINED:
            return f"{self.base}~"
        if self.namespace is Namespace.LOCATION:
            return f"#{self.base}"
        return self.base


class Term:
    """
    Base class of term nodes.

    Every node caches its free variables and the constructor counts of its
    unfolded tree at construction time, so ``size`` and the potential of a
    shared DAG are read in constant time.
    """

    __slots__ = ()

    @property
    def size(self) -> int:
        return self.n_vars + self.n_apps + self.n_lams

    def __repr__(self):
        from rknl_machine.core.syntax import print_term

        if self.size <= 200:
            return f"<{type(self).__name__} {print_term(self)}>"
        return f"<{type(self).__name__} size={self.size}>"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    ident: Ident
    free_vars: frozenset = field(init=False, compare=False)
    n_vars: int = field(init=False, compare=False)
    n_apps: int = field(init=False, compare=False)
    n_lams: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "free_vars", frozenset((self.ident,)))
        object.__setattr__(self, "n_vars", 1)
        object.__setattr__(self, "n_apps", 0)
        object.__setattr__(self, "n_lams", 0)


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fun: Term
    arg: Term
    free_vars: frozenset = field(init=False, compare=False)
    n_vars: int = field(init=False, compare=False)
    n_apps: int = field(init=False, compare=False)
    n_lams: int = field(init=False, compare=False)

    def __post_init__(self):
        fv_fun, fv_arg = self.fun.free_vars, self.arg.free_vars
        object.__setattr__(self, "free_vars", fv_fun if fv_arg <= fv_fun else fv_fun | fv_arg)
        object.__setattr__(self, "n_vars", self.fun.n_vars + self.arg.n_vars)
        object.__setattr__(self, "n_apps", 1 + self.fun.n_apps + self.arg.n_apps)
        object.__setattr__(self, "n_lams", self.fun.n_lams + self.arg.n_lams)


@dataclass(frozen=True, eq=False, repr=False)
class Lam(Term):
    binder: Ident
    body: Term
    free_vars: frozenset = field(init=False, compare=False)
    n_vars: int = field(init=False, compare=False)
    n_apps: int = field(init=False, compare=False)
    n_lams: int = field(init=False, compare=False)

    def __post_init__(self):
        fv = self.body.free_vars
        object.__setattr__(self, "free_vars", fv - {self.binder} if self.binder in fv else fv)
        object.__setattr__(self, "n_vars", self.body.n_vars)
        object.__setattr__(self, "n_apps", self.body.n_apps)
        object.__setattr__(self, "n_lams", 1 + self.body.n_lams)


class Step(Enum):
    APP_LEFT = "app-left"
    APP_RIGHT = "app-right"
    LAM_BODY = "lam-body"


ContextPath = Tuple[Step, ...]


@dataclass(frozen=True)
class ContextFrame:
    """
    One layer of a context, read from the hole outward.

    ``other`` is the argument for APP_LEFT (``□ t``), the function for
    APP_RIGHT (``t □``) and the binder for LAM_BODY (``λx.□``).
    """
    step: Step
    other: Union[Term, Ident]

    def wrap(self, t: Term) -> Term:
        if self.step is Step.APP_LEFT:
            return App(t, self.other)
        if self.step is Step.APP_RIGHT:
            return App(self.other, t)
        return Lam(self.other, t)


def unwind_spine(t: Term) -> Tuple[Term, list]:
    """Split ``h a1 ... ak`` into ``h`` and ``[a1, ..., ak]``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def free_vars(t: Term) -> frozenset:
    return t.free_vars


def size(t: Term, limit: Optional[int] = None) -> int:
    """Constructor count of the unfolded tree."""
    n = t.size
    if limit is not None and n > limit:
        raise SizeOverflow(limit=limit)
    return n


def term_graph(t: Term) -> nx.MultiDiGraph:
    """
    The sharing graph of a term: one node per distinct shared node (keyed by
    identity, the term kept as the ``term`` attribute) and one edge per child
    position, keyed by the step that reaches it.
    """
    g = nx.MultiDiGraph()
    g.add_node(id(t), term=t)
    todo = [t]
    while todo:
        node = todo.pop()
        if isinstance(node, App):
            children = ((Step.APP_LEFT, node.fun), (Step.APP_RIGHT, node.arg))
        elif isinstance(node, Lam):
            children = ((Step.LAM_BODY, node.body),)
        else:
            continue
        for step, child in children:
            if id(child) not in g:
                g.add_node(id(child), term=child)
                todo.append(child)
            g.add_edge(id(node), id(child), key=step)
    return g


def node_count(t: Term) -> int:
    """Number of distinct shared nodes."""
    return term_graph(t).number_of_nodes()


def subterms(t: Term) -> frozenset:
    """Identities of every node reachable from ``t``."""
    return frozenset(term_graph(t).nodes)


def term_eq(a: Term, b: Term, known: Optional[Dict[tuple, tuple]] = None) -> bool:
    """
    Structural equality. Pairs of nodes already compared are skipped, so
    shared DAGs compare in time linear in the number of distinct node pairs.
    ``known`` carries pairs proven equal across calls; it maps the identity
    pair to the nodes themselves, which keeps the identities from being
    reused while the entry exists.
    """
    if a is b:
        return True
    seen = {}
    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        if x is y:
            continue
        key = (id(x), id(y))
        if key in seen or (known is not None and key in known):
            continue
        seen[key] = (x, y)
        if type(x) is not type(y) or x.n_apps != y.n_apps or x.n_vars != y.n_vars \
                or x.n_lams != y.n_lams:
            return False
        if isinstance(x, Var):
            if x.ident != y.ident:
                return False
        elif isinstance(x, App):
            todo.append((x.arg, y.arg))
            todo.append((x.fun, y.fun))
        else:
            if x.binder != y.binder:
                return False
            todo.append((x.body, y.body))
    if known is not None:
        known.update(seen)
    return True


def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""
    empty = Map()
    closed_pairs = set()
    todo = [(a, b, empty, empty, 0)]
    while todo:
        x, y, ex, ey, depth = todo.pop()
        if type(x) is not type(y) or x.size != y.size:
            return False
        # subterms whose free variables are not bound above compare independently of the binders
        unbound = not any(v in ex for v in x.free_vars) and not any(v in ey for v in y.free_vars)
        if unbound:
            if x is y:
                continue
            key = (id(x), id(y))
            if key in closed_pairs:
                continue
            closed_pairs.add(key)
        if isinstance(x, Var):
            lx, ly = ex.get(x.ident), ey.get(y.ident)
            if lx is None and ly is None:
                if x.ident != y.ident:
                    return False
            elif lx != ly:
                return False
        elif isinstance(x, App):
            todo.append((x.arg, y.arg, ex, ey, depth))
            todo.append((x.fun, y.fun, ex, ey, depth))
        else:
            todo.append((x.body, y.body, ex.set(x.binder, depth), ey.set(y.binder, depth), depth + 1))
    return True


_VISIT, _BUILD_APP, _BUILD_LAM = range(3)


def transform(t: Term, env: Map,
              on_var: Callable[[Var, Map], Term],
              on_lam: Callable[[Lam, Map], Tuple[Ident, Map]],
              keep: Optional[Callable[[Term, Map], bool]] = None,
              memo: Optional[dict] = None) -> Term:
    """
    Rebuild ``t`` bottom-up with an explicit stack, so nesting depth is
    bounded by memory only.

    ``on_var`` gives the replacement of a variable under ``env``; ``on_lam``
    gives the new binder of an abstraction and the environment for its body.
    Subterms for which ``keep`` holds are reused as they are. Results are
    memoized on the node and environment pair; a caller may pass ``memo`` to
    share results across calls. Entries hold the node and the environment,
    so their identities stay valid.
    """
    memo = {} if memo is None else memo
    out = []
    todo = [(_VISIT, t, env, None)]
    while todo:
        op, node, env, binder = todo.pop()
        key = (id(node), id(env))
        if op == _VISIT:
            if keep is not None and keep(node, env):
                out.append(node)
                continue
            hit = memo.get(key)
            if hit is not None:
                out.append(hit[2])
                continue
            if isinstance(node, Var):
                result = on_var(node, env)
            elif isinstance(node, App):
                todo.append((_BUILD_APP, node, env, None))
                todo.append((_VISIT, node.arg, env, None))
                todo.append((_VISIT, node.fun, env, None))
                continue
            else:
                binder, inner = on_lam(node, env)
                todo.append((_BUILD_LAM, node, env, binder))
                todo.append((_VISIT, node.body, inner, None))
                continue
        elif op == _BUILD_APP:
            arg = out.pop()
            result = App(out.pop(), arg)
        else:
            result = Lam(binder, out.pop())
        memo[key] = (node, env, result)
        out.append(result)
    return out[0]


def rename_bound(t: Term, mapping: dict) -> Term:
    """
    Rename the binders listed in ``mapping`` together with the occurrences
    they bind. The renaming must be injective and must not capture.
    """
    def on_var(var, env):
        return Var(env[var.ident]) if var.ident in env else var

    def on_lam(lam, env):
        if lam.binder in mapping:
            new = mapping[lam.binder]
            return new, env.set(lam.binder, new)
        return lam.binder, env.delete(lam.binder) if lam.binder in env else env

    return transform(t, Map(), on_var, on_lam)


def child(t: Term, step: Step) -> Term:
    if step is Step.APP_LEFT and isinstance(t, App):
        return t.fun
    if step is Step.APP_RIGHT and isinstance(t, App):
        return t.arg
    if step is Step.LAM_BODY and isinstance(t, Lam):
        return t.body
    raise ValueError(f"{step.value} does not address a child of {type(t).__name__}")


def subterm_at(t: Term, path: Sequence[Step]) -> Term:
    for step in path:
        t = child(t, step)
    return t


def replace_at(t: Term, path: Sequence[Step], s: Term) -> Term:
    """Rebuild ``t`` with the subterm at ``path`` replaced by ``s``."""
    frames = []
    for step in path:
        if step is Step.APP_LEFT:
            frames.append(ContextFrame(step, t.arg))
        elif step is Step.APP_RIGHT:
            frames.append(ContextFrame(step, t.fun))
        else:
            frames.append(ContextFrame(step, t.binder))
        t = child(t, step)
    frames.reverse()
    return plug(frames, s)


def plug(frames: Iterable[ContextFrame], t: Term) -> Term:
    """Plug ``t`` into a context given from the hole outward."""
    for frame in frames:
        t = frame.wrap(t)
    return t


def context_path(frames: Sequence[ContextFrame]) -> ContextPath:
    return tuple(frame.step for frame in reversed(frames))
