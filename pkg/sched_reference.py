"""
Reference fixed-priority scheduler used as a test oracle.

Replays a small system of tasks and semaphores with zero switching cost,
straight from the scheduling rules and without the event engine, the machine
or the kernel:

* the highest-priority ready task runs; equal priorities run in the order
  they became ready;
* a semaphore release wakes the best waiter (priority, then block time) and
  preempts the running task only if the woken task is strictly more urgent;
* at one instant, external releases are applied first, in order, each one
  followed by all the zero-time work it causes; a compute step that ends at
  that instant completes afterwards.

Steps are ``("compute", d)`` with d >= 1, ``("wait", s)`` and ``("release", s)``.
"""
from typing import List, Sequence, Tuple

Step = Tuple[str, int]
TaskSpec = Tuple[str, int, Sequence[Step]]
Span = Tuple[str, int, int]


def normalize(spans: Sequence[Span]) -> List[Span]:
    """Drop empty run intervals and merge back-to-back ones of the same task."""
    merged: List[Span] = []
    for name, start, stop in spans:
        if stop <= start:
            continue
        if merged and merged[-1][0] == name and merged[-1][2] == start:
            merged[-1] = (name, merged[-1][1], stop)
        else:
            merged.append((name, start, stop))
    return merged


class ReferenceScheduler:

    def __init__(self, tasks: Sequence[TaskSpec], sem_counts: Sequence[int], externals: Sequence[Tuple[int, int]]):
        self.names = [t[0] for t in tasks]
        self.prio = [t[1] for t in tasks]
        self.steps = [list(t[2]) for t in tasks]
        n = len(tasks)
        self.pc = [0] * n
        self.remaining = [0] * n
        self.computing = [False] * n
        self.done_pending = [False] * n
        self.ready = list(range(n))
        self.counts = list(sem_counts)
        self.waiters: List[list] = [[] for _ in sem_counts]
        self.externals = list(externals)
        self.running = None
        self.run_start = 0
        self.now = 0
        self.block_seq = 0
        self.spans: List[Span] = []

    def _stop_running(self) -> None:
        self.spans.append((self.names[self.running], self.run_start, self.now))
        self.running = None

    def _pick(self) -> int:
        best = self.ready[0]
        for i in self.ready[1:]:
            if self.prio[i] > self.prio[best]:
                best = i
        return best

    def _release(self, sem: int) -> None:
        queue = self.waiters[sem]
        if not queue:
            self.counts[sem] += 1
            return
        queue.sort()
        woken = queue.pop(0)[3]
        self.ready.append(woken)
        if self.running is not None and self.prio[woken] > self.prio[self.running]:
            preempted = self.running
            self.done_pending[preempted] = False
            self._stop_running()
            self.ready.append(preempted)

    def _settle(self) -> None:
        while True:
            if self.running is None:
                if not self.ready:
                    return
                i = self._pick()
                self.ready.remove(i)
                self.running = i
                self.run_start = self.now
            i = self.running
            if self.computing[i]:
                if self.remaining[i] > 0 or self.done_pending[i]:
                    return
                self.computing[i] = False
                self.pc[i] += 1
            if self.pc[i] >= len(self.steps[i]):
                self._stop_running()
                continue
            op, arg = self.steps[i][self.pc[i]]
            if op == "compute":
                self.computing[i] = True
                self.remaining[i] = arg
            elif op == "wait":
                self.pc[i] += 1
                if self.counts[arg] > 0:
                    self.counts[arg] -= 1
                else:
                    self.waiters[arg].append((-self.prio[i], self.now, self.block_seq, i))
                    self.block_seq += 1
                    self._stop_running()
            elif op == "release":
                self.pc[i] += 1
                self._release(arg)
            else:
                raise ValueError(f"unknown step {op!r}")

    def run(self) -> List[Span]:
        self._settle()
        k = 0
        while True:
            candidates = []
            if k < len(self.externals):
                candidates.append(self.externals[k][0])
            busy = self.running is not None and self.computing[self.running]
            if busy:
                candidates.append(self.now + self.remaining[self.running])
            if not candidates:
                break
            target = min(candidates)
            if busy:
                self.remaining[self.running] -= target - self.now
                if self.remaining[self.running] == 0:
                    self.done_pending[self.running] = True
            self.now = target
            while k < len(self.externals) and self.externals[k][0] == self.now:
                self._release(self.externals[k][1])
                k += 1
                self._settle()
            if self.running is not None and self.done_pending[self.running]:
                self.done_pending[self.running] = False
                self._settle()
        return normalize(self.spans)


def reference_intervals(tasks: Sequence[TaskSpec], sem_counts: Sequence[int], externals: Sequence[Tuple[int, int]]) -> List[Span]:
    """Task run intervals ``(name, start, stop)`` in time order.

    Args:
        tasks: ``(name, priority, steps)`` in creation order
        sem_counts: Initial count of each semaphore, indexed by semaphore number
        externals: ``(time, semaphore)`` releases from outside any task, in firing order

    Returns:
        List of non-empty, merged run intervals
    """
    return ReferenceScheduler(tasks, sem_counts, externals).run()
