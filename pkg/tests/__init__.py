"""Unit test package for rknl_machine."""

import logging

from rknl_machine.core.oracle import no_normalize
from rknl_machine.common.exception import FuelExhausted
from rknl_machine.core.syntax import parse
from rknl_machine.bench.corpus import random_closed_terms


logger = logging.getLogger(__name__)
log_format = \
    '%(asctime)s - %(name)s - {%(filename)s:%(lineno)d} - [%(threadName)s] - %(levelname)s - %(message)s'
logging.basicConfig(handlers=[logging.StreamHandler()], format=log_format, force=True)

ELABORATE = r"(\x.c x x) ((\y.\z.(\w.w) z) ((\x.x x)(\x.x x)))"
ELABORATE_RULES = [1, 2, 6, 1, 1, 4, 9, 3, 1, 2, 6, 2, 5, 7, 1, 2, 6, 3, 4, 5, 11, 5, 10, 9, 4, 8, 10]

_terminating = {}


def terminating_corpus(seed: int, count: int, max_size: int, fuel: int):
    """Random closed terms whose normal-order reduction ends within ``fuel`` beta steps."""
    key = (seed, count, max_size, fuel)
    if key not in _terminating:
        kept = []
        for t in random_closed_terms(seed, count, max_size):
            try:
                kept.append((t, no_normalize(t, fuel)))
            except FuelExhausted:
                continue
        _terminating[key] = kept
    return _terminating[key]


def acceptance_corpus():
    """Random closed terms of size at most 25 that normalize within 10_000 normal-order steps."""
    return terminating_corpus(seed=5, count=500, max_size=25, fuel=10_000)


class MachineTest():
    def setup(self):
        global logger
        self._log = logger
        self.I = parse(r"\x.x")
        self.omega = parse(r"\x.x x")
        self.Omega = parse(r"(\x.x x) (\x.x x)")
        self.A_Omega = parse(r"(\y.\z.(\w.w) z) ((\x.x x) (\x.x x))")
        self.elaborate = parse(ELABORATE)
        self.c2 = parse(r"\f.\x.f (f x)")
