import threading
from datetime import datetime, timedelta


class MetricsController:
    """
    Integer tallies shared by the parts of a run (solves, stored value
    functions reused, relaxed QP constraints). Every operation holds a
    lock, so policies evaluated from several threads can share one
    controller.
    """

    def __init__(self, app=None):
        self.app = app
        self.started = datetime.now()
        self.tallies: dict[str, int] = {}
        self._lock = threading.Lock()

    @property
    def elapsed(self) -> timedelta:
        """Wall time since the controller was created."""
        return datetime.now() - self.started

    def new(self, field: str, data_type=int) -> None:
        """(Re)start ``field`` at zero."""
        with self._lock:
            self.tallies[field] = data_type()

    def ensure(self, field: str, data_type=int) -> None:
        """Create ``field`` unless it already exists."""
        with self._lock:
            self.tallies.setdefault(field, data_type())

    def get(self, field: str) -> int:
        with self._lock:
            return self.tallies[field]

    def increment(self, field: str, n: int = 1) -> None:
        with self._lock:
            self.tallies[field] += n

    def snapshot(self) -> dict[str, int]:
        """A copy of every tally."""
        with self._lock:
            return dict(self.tallies)


__all__ = [
    "MetricsController",
]
