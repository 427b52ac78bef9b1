from typing import Callable


class Segment:
    """A stretch of CPU time owned by one execution level.

    ``remaining`` is exact while the segment is suspended; while it runs,
    ``end`` holds the absolute completion time and ``handle`` the queued event.
    """

    __slots__ = ("label", "remaining", "on_done", "owner", "guard", "end", "handle")

    def __init__(self, label: str, remaining: int, on_done: Callable[[], None], owner=None, guard=None):
        self.label = label
        self.remaining = remaining
        self.on_done = on_done
        self.owner = owner
        self.guard = guard
        self.end = 0
        self.handle = None

    @property
    def running(self) -> bool:
        return self.handle is not None

    def __repr__(self) -> str:
        return f"Segment({self.label!r}, remaining={self.remaining})"
