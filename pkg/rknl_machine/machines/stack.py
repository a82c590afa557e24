from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional


@dataclass(frozen=True, eq=False)
class Stack:
    """
    Persistent stack: pushing shares the existing tail, so every older
    configuration keeps a valid stack.
    """
    top: Any = None
    rest: Optional["Stack"] = None
    depth: int = 0

    @classmethod
    def of(cls, frames: Iterable[Any]) -> "Stack":
        """Build a stack from frames listed top first."""
        s = EMPTY_STACK
        for frame in reversed(list(frames)):
            s = s.push(frame)
        return s

    def push(self, frame) -> "Stack":
        return Stack(frame, self, self.depth + 1)

    def __iter__(self) -> Iterator[Any]:
        s = self
        while s.depth:
            yield s.top
            s = s.rest

    def __len__(self):
        return self.depth

    def __bool__(self):
        return self.depth > 0

    def __eq__(self, other):
        if not isinstance(other, Stack):
            return NotImplemented
        if self is other:
            return True
        if self.depth != other.depth:
            return False
        a, b = self, other
        while a.depth:
            if a is b:
                return True
            if a.top != b.top:
                return False
            a, b = a.rest, b.rest
        return True

    __hash__ = None

    def __repr__(self):
        return f"Stack({list(self)!r})"


EMPTY_STACK = Stack()
