from dataclasses import dataclass
from typing import Iterator, List, Optional


@dataclass(frozen=True)
class TraceRecord:
    """One entry of a run's execution trace."""
    time: int
    kind: str
    subject: str
    detail: str = ""


class TraceLog:
    """Append-only execution trace shared by the machine and the kernel.

    Record kinds:
        isr-dispatch, isr-entry, isr-exit: hardware interrupt path (subject = line)
        mask-begin, mask-end: hard-mask section (subject = subsystem)
        run-begin, run-end: a task owns the CPU at base level (subject = task)
        ready: a task joins the ready queue (subject = task)
        switch: a context switch starts (subject = incoming task, detail = outgoing task)
        block: a task waits on a semaphore (subject = semaphore, detail = task)
        finish: a task ran out of steps (subject = task)
        release, wake: semaphore traffic (subject = semaphore, detail = task)
        guest-pending, guest-deliver: virtualized dispatch outcomes (subject = line)
    """

    def __init__(self):
        self.records: List[TraceRecord] = []

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def add(self, time: int, kind: str, subject: str, detail: str = "") -> None:
        self.records.append(TraceRecord(time, kind, subject, detail))

    def of_kind(self, kind: str, subject: Optional[str] = None) -> List[TraceRecord]:
        return [
            r for r in self.records
            if r.kind == kind and (subject is None or r.subject == subject)
        ]

    def intervals(self, begin: str, end: str) -> List[tuple]:
        """Pair begin/end records per subject into ``(subject, start, stop)`` tuples."""
        open_at = {}
        spans = []
        for record in self.records:
            if record.kind == begin:
                open_at[record.subject] = record.time
            elif record.kind == end and record.subject in open_at:
                spans.append((record.subject, open_at.pop(record.subject), record.time))
        return spans
