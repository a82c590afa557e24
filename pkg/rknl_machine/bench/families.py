"""
The six benchmark term families and the closed forms of their step counts.
"""

from dataclasses import dataclass
from typing import Callable, Dict

from rknl_machine.common.constants import Constants, Engine
from rknl_machine.common.exception import InvalidInvocation, OutOfRange
from rknl_machine.core.syntax import parse
from rknl_machine.core.term import App, Ident, Lam, Term, Var

I = parse(r"\x.x")
K = parse(r"\x.\y.x")
K_FLIPPED = parse(r"\x.\y.y")
PAIR = parse(r"\x.\y.\f.f x y")
DUB = parse(r"\x.\f.f x x")
OMEGA_SMALL = parse(r"\x.x x")
ETA_I = Lam(Ident.source("x"), App(I, Var(Ident.source("x"))))

# pred with K, flipped K and pair inlined
PRED = Lam(Ident.source("n"), Lam(Ident.source("f"), Lam(Ident.source("x"), App(
    App(
        App(Var(Ident.source("n")),
            Lam(Ident.source("e"),
                App(App(PAIR, App(Var(Ident.source("e")), K)),
                    App(Var(Ident.source("f")), App(Var(Ident.source("e")), K))))),
        App(App(PAIR, Var(Ident.source("x"))), Var(Ident.source("x")))),
    K_FLIPPED))))

_CPS_DUB = parse(r"\x.\k.k (\f.f x x)")


def church(n: int) -> Term:
    """``λf.λx.f (f (... (f x)))`` with ``n`` applications."""
    f, x = Ident.source("f"), Ident.source("x")
    body = Var(x)
    for _ in range(n):
        body = App(Var(f), body)
    return Lam(f, Lam(x, body))


def cps_chain(n: int) -> Term:
    """``d_0 = I``, ``d_n = λv.((λx.λk.k (λf.f x x)) v) d_{n-1}``."""
    v = Ident.source("v")
    d = I
    for _ in range(n):
        d = Lam(v, App(App(_CPS_DUB, Var(v)), d))
    return d


@dataclass(frozen=True)
class Family:
    name: str
    generator: Callable[[int], Term]
    formulas: Dict[Engine, Callable[[int], int]]
    kn: Callable[[int], int]

    def make(self, n: int) -> Term:
        if n < 0:
            raise OutOfRange(n=n, lo=0, hi="any")
        return self.generator(n)

    def expected(self, engine: Engine, n: int) -> int:
        _check_range(n)
        return self.formulas[Engine(engine)](n)

    def expected_kn(self, n: int) -> int:
        _check_range(n)
        return self.kn(n)


def _check_range(n: int):
    if not Constants.BENCH_MIN_N <= n <= Constants.BENCH_MAX_N:
        raise OutOfRange(n=n, lo=Constants.BENCH_MIN_N, hi=Constants.BENCH_MAX_N)


def _same_for_both(no, rknl):
    return {Engine.NO: no, Engine.RKNL: rknl, Engine.RKNL_NO8: rknl}


FAMILIES: Dict[str, Family] = {f.name: f for f in [
    Family("cn_c2_I",
           lambda n: App(App(church(n), church(2)), I),
           _same_for_both(lambda n: 3 * 2**n - 1, lambda n: 10 * 2**n + 5 * n + 5),
           lambda n: 15 * 2**n - 6),
    Family("pred_cn",
           lambda n: App(PRED, church(n)),
           _same_for_both(lambda n: 6 * n + 8, lambda n: 30 * n + 41),
           lambda n: 26 * n + 25),
    Family("lam_cn_omega",
           lambda n: Lam(Ident.source("x"), App(App(church(n), OMEGA_SMALL), Var(Ident.source("x")))),
           _same_for_both(lambda n: 2**n + 1, lambda n: 9 * n + 15),
           lambda n: 12 * 2**n - 3),
    Family("cn_dub_I",
           lambda n: App(App(church(n), DUB), I),
           {Engine.NO: lambda n: 2**n + 1,
            Engine.RKNL: lambda n: 18 * n + 15,
            Engine.RKNL_NO8: lambda n: 16 * 2**n + 5 * n - 1},
           lambda n: 23 * 2**n - 14),
    Family("cn_dub_etaI",
           lambda n: App(App(church(n), DUB), ETA_I),
           {Engine.NO: lambda n: 2 * 2**n + 1,
            Engine.RKNL: lambda n: 18 * n + 20,
            Engine.RKNL_NO8: lambda n: 21 * 2**n + 5 * n - 1},
           lambda n: 26 * 2**n - 14),
    Family("dn_I",
           lambda n: App(cps_chain(n), I),
           {Engine.NO: lambda n: 3 * n + 1,
            Engine.RKNL: lambda n: 28 * n + 10,
            Engine.RKNL_NO8: lambda n: 16 * 2**n + 15 * n - 6},
           lambda n: 22 * 2**n + 7 * n - 15),
]}


def family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise InvalidInvocation(f"unknown family {name}, expected one of: {', '.join(FAMILIES)}")


def make(name: str, n: int) -> Term:
    return family(name).make(n)


def expected_steps(name: str, engine: Engine, n: int) -> int:
    return family(name).expected(engine, n)


def expected_kn(name: str, n: int) -> int:
    return family(name).expected_kn(n)
