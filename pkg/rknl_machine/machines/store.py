"""
Store, locations and fresh names of one RKNL run.

The store is an append-only array of cells. Each cell keeps the history of
its contents as ``(time, content)`` entries, so a :class:`StoreView` taken at
time ``t`` reads the store exactly as it was after step ``t``. Configurations
hold views, which makes every trace snapshot persistent without copying.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Tuple, Union

from immutables import Map

from rknl_machine.common.constants import Constants
from rknl_machine.common.exception import FreshExhausted, IllFormed, WriteOnceViolation
from rknl_machine.core.term import Ident, Lam, Namespace, Term

logger = logging.getLogger(__name__)

# persistent map Ident -> Location; extension shares structure with the original
Env = Map
EMPTY_ENV = Map()


class LocationKind(Enum):
    ARG = "arg"
    ANNOT = "annot"


@dataclass(frozen=True, order=True)
class Location:
    id: int
    kind: LocationKind

    def __str__(self):
        return f"l{self.id}"


@dataclass(frozen=True)
class Closure:
    term: Term
    env: "Env"


@dataclass(frozen=True)
class PlainTerm:
    term: Term


@dataclass(frozen=True)
class AnnotAbs:
    """An abstraction closure tagged with the location reserved for its normal form."""
    lam: Lam
    env: "Env"
    annot: Location

    @property
    def binder(self) -> Ident:
        return self.lam.binder

    @property
    def body(self) -> Term:
        return self.lam.body


Value = Union[PlainTerm, AnnotAbs]


class _TodoEmpty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TodoEmpty"


TODO_EMPTY = _TodoEmpty()


@dataclass(frozen=True)
class TodoClosure:
    closure: Closure


@dataclass(frozen=True)
class Done:
    value: Value


Storable = Union[_TodoEmpty, TodoClosure, Done]


class _ByRule2:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ByRule2"


BY_RULE2 = _ByRule2()


@dataclass(frozen=True)
class ByRule6:
    closure: Closure


@dataclass(frozen=True)
class ByRule7:
    fresh: Ident


InitRecord = Union[_ByRule2, ByRule6, ByRule7]


class FreshNames:
    """
    Per-run supply of fresh identifiers, one counter per base name starting
    at 0. Fresh identifiers already present in the loaded term are skipped.
    """

    def __init__(self, reserved: Iterable[Ident] = (), limit: int = Constants.MAX_FRESH_INDEX):
        self._counters = {}
        self._reserved = frozenset(i for i in reserved if i.namespace is Namespace.FRESH)
        self._limit = limit

    def __call__(self, base: Ident) -> Ident:
        k = self._counters.get(base.base, 0)
        while True:
            if k > self._limit:
                raise FreshExhausted(base=base.base)
            name = Ident.fresh(base.base, k)
            k += 1
            if name not in self._reserved:
                break
        self._counters[base.base] = k
        return name


class Store:
    def __init__(self, names: FreshNames = None):
        self._history: List[List[Tuple[int, Storable]]] = []
        self._records: List[InitRecord] = []
        self._kinds: List[LocationKind] = []
        self._born: List[int] = []
        self.clock = 0
        self.names = names if names else FreshNames()

    def __len__(self):
        return len(self._records)

    def tick(self) -> int:
        self.clock += 1
        return self.clock

    def alloc(self, kind: LocationKind, content: Storable, record: InitRecord) -> Location:
        location = Location(len(self._records), kind)
        self._history.append([(self.clock, content)])
        self._records.append(record)
        self._kinds.append(kind)
        self._born.append(self.clock)
        return location

    def write(self, location: Location, content: Storable, rewrite: bool = False):
        history = self._history[location.id]
        if isinstance(history[-1][1], Done) and not rewrite:
            raise WriteOnceViolation(location=str(location))
        if history[-1][0] == self.clock:
            history[-1] = (self.clock, content)
        else:
            history.append((self.clock, content))

    def size_at(self, time: int) -> int:
        return bisect_right(self._born, time)

    def read(self, location: Location, time: int) -> Storable:
        if location.id >= self.size_at(time):
            raise IllFormed(f"location {location} is not allocated at time {time}")
        for when, content in reversed(self._history[location.id]):
            if when <= time:
                return content
        raise IllFormed(f"location {location} has no content at time {time}")

    def record(self, location: Location) -> InitRecord:
        return self._records[location.id]

    def location(self, ident: int) -> Location:
        return Location(ident, self._kinds[ident])

    def view(self, time: int = None) -> "StoreView":
        return StoreView(self, self.clock if time is None else time)


@dataclass(frozen=True)
class StoreView:
    """The store as seen after step ``time``."""
    store: Store
    time: int

    def get(self, location: Location) -> Storable:
        return self.store.read(location, self.time)

    def record(self, location: Location) -> InitRecord:
        return self.store.record(location)

    @property
    def size(self) -> int:
        return self.store.size_at(self.time)

    @property
    def is_current(self) -> bool:
        return self.time == self.store.clock

    def cells(self) -> Iterator[Tuple[Location, Storable]]:
        for i in range(self.size):
            location = self.store.location(i)
            yield location, self.get(location)


@dataclass(frozen=True)
class FrozenStore:
    """A read-only store built from a mapping, used for projected ghost configurations."""
    contents: Dict[int, Tuple[Location, Storable]]

    def get(self, location: Location) -> Storable:
        if location.id not in self.contents:
            raise IllFormed(f"location {location} is not allocated")
        return self.contents[location.id][1]

    @property
    def size(self) -> int:
        return len(self.contents)

    def cells(self) -> Iterator[Tuple[Location, Storable]]:
        for i in sorted(self.contents):
            yield self.contents[i]
