#!/usr/bin/env python3
"""
Tests for the priority-preemptive kernel: task selection, semaphores,
context-switch costs, guest handling and equivalence with the reference
scheduler.

Run with: python -m unittest test_kernel
"""
import logging
import unittest

from hypothesis import given, settings, strategies as st

from irqsim.core.engine import Engine, EventKind
from irqsim.core.rng import Rng
from irqsim.core.trace import TraceLog
from irqsim.exceptions import SchedulerError, UnknownSemaphore
from irqsim.kernel.scheduler import Kernel
from irqsim.kernel.tasks import Call, Compute, Release, Sleep, TaskState, Wait
from irqsim.machine.machine import Machine
from irqsim.models.distributions import constant
from irqsim.models.scenario import ArchConfig, CostModel
from sched_reference import normalize, reference_intervals

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def make_kernel(variant="direct", sched_decide=0, trace=True):
    engine = Engine()
    log = TraceLog() if trace else None
    machine = Machine(engine, ArchConfig(variant=variant, costs=CostModel()), Rng(7), log)
    kernel = Kernel(engine, machine, sched_decide=sched_decide, rng=Rng(11), trace=log)
    return engine, machine, kernel, log


def run_spans(log):
    return normalize([s for s in log.intervals("run-begin", "run-end") if s[0] != "idle"])


class TestPickNext(unittest.TestCase):
    """Task selection"""

    def test_highest_priority_wins(self):
        engine, machine, kernel, _ = make_kernel()
        kernel.create_task("low", 5, [])
        high = kernel.create_task("high", 10, [])
        self.assertIs(kernel.pick_next(), high)

    def test_fifo_within_priority(self):
        engine, machine, kernel, _ = make_kernel()
        late = kernel.create_task("late", 7, [])
        early = kernel.create_task("early", 7, [])
        late.ready_since, early.ready_since = 3, 1
        self.assertIs(kernel.pick_next(), early)

    def test_only_idle_ready(self):
        engine, machine, kernel, _ = make_kernel()
        kernel.start()
        self.assertIs(kernel.pick_next(), kernel.idle)
        self.assertIs(kernel.current, kernel.idle)


class TestSemaphores(unittest.TestCase):
    """sem_wait / sem_release semantics"""

    def test_wait_with_count_does_not_switch(self):
        engine, machine, kernel, _ = make_kernel()
        sem = kernel.create_semaphore("s", count=1)
        task = kernel.create_task("t", 5, [Wait(sem.id), Compute(10)])
        kernel.start()
        engine.run()
        self.assertEqual(sem.count, 0)
        self.assertEqual(task.state, TaskState.FINISHED)
        self.assertEqual(task.dispatches, 1)

    def test_wait_without_count_blocks_and_next_runs(self):
        engine, machine, kernel, log = make_kernel()
        sem = kernel.create_semaphore("s")
        high = kernel.create_task("high", 10, [Wait(sem.id), Compute(5)])
        low = kernel.create_task("low", 5, [Compute(20)])
        kernel.start()
        engine.run()
        self.assertEqual(high.state, TaskState.BLOCKED)
        self.assertEqual(low.state, TaskState.FINISHED)
        self.assertEqual(run_spans(log), [("low", 0, 20)])

    def test_wait_queue_orders_by_priority(self):
        engine, machine, kernel, _ = make_kernel()
        sem = kernel.create_semaphore("s")
        kernel.create_task("p10", 10, [Compute(5), Wait(sem.id)])
        kernel.create_task("p5", 5, [Wait(sem.id)])
        kernel.start()
        engine.run()
        self.assertEqual([w[3].name for w in sem.waiters], ["p10", "p5"])

    def test_release_without_waiters_counts_up(self):
        engine, machine, kernel, _ = make_kernel()
        sem = kernel.create_semaphore("s")
        self.assertIsNone(kernel.sem_release(sem.id))
        self.assertEqual(sem.count, 1)

    def test_unknown_semaphore(self):
        engine, machine, kernel, _ = make_kernel()
        with self.assertRaises(UnknownSemaphore):
            kernel.sem_release(99)

    def test_release_preempts_lower_task_once(self):
        engine, machine, kernel, log = make_kernel()
        sem = kernel.create_semaphore("s")
        high = kernel.create_task("p10", 10, [Wait(sem.id), Compute(5)])
        low = kernel.create_task("p4", 4, [Compute(30)])
        engine.schedule(10, EventKind.CUSTOM, callback=lambda e: kernel.sem_release(sem.id))
        kernel.start()
        engine.run()
        self.assertEqual(run_spans(log), [("p4", 0, 10), ("p10", 10, 15), ("p4", 15, 35)])
        self.assertEqual(low.dispatches, 2)
        self.assertEqual(high.state, TaskState.FINISHED)

    def test_no_lost_wakeups(self):
        engine, machine, kernel, _ = make_kernel()
        sem = kernel.create_semaphore("s")
        taken = []
        kernel.create_task("consumer", 8, [Wait(sem.id), Call(lambda: taken.append(1))] * 3)
        kernel.create_task("producer", 3, [Compute(4), Release(sem.id)] * 5)
        kernel.start()
        engine.run()
        self.assertEqual(sem.released, sem.acquired + sem.count)
        self.assertEqual(len(taken), 3)
        self.assertEqual(sem.count, 2)


class TestContextSwitch(unittest.TestCase):
    """Context-switch cost model"""

    def test_constant_costs_add_up(self):
        engine, machine, kernel, _ = make_kernel(sched_decide=700)
        a = kernel.create_task("a", 5, [], context_cost=constant(800))
        b = kernel.create_task("b", 6, [], context_cost=constant(800))
        self.assertEqual(kernel.context_switch(a, b), 2300)

    def test_self_switch_rejected(self):
        engine, machine, kernel, _ = make_kernel()
        a = kernel.create_task("a", 5, [])
        with self.assertRaises(SchedulerError):
            kernel.context_switch(a, a)

    def test_zero_cost_model(self):
        engine, machine, kernel, _ = make_kernel()
        a = kernel.create_task("a", 5, [])
        b = kernel.create_task("b", 6, [])
        self.assertEqual(kernel.context_switch(a.id, b.id), 0)

    def test_wrapper_overhead_charged_on_switch_in(self):
        engine, machine, kernel, _ = make_kernel(sched_decide=500)
        a = kernel.create_task("a", 5, [], context_cost=constant(600))
        b = kernel.create_task("b", 6, [], context_cost=constant(600), wrapper_overhead=constant(100))
        self.assertEqual(kernel.context_switch(a, b), 1800)
        self.assertEqual(kernel.context_switch(b, a), 1700)

    def test_switch_takes_time(self):
        engine, machine, kernel, log = make_kernel(sched_decide=1000)
        kernel.create_task("t", 5, [Compute(50)])
        kernel.start()
        engine.run()
        self.assertEqual(run_spans(log), [("t", 1000, 1050)])


class TestSleepAndGuest(unittest.TestCase):
    """Sleeping tasks and the guest task"""

    def test_sleep_lets_lower_task_run(self):
        engine, machine, kernel, log = make_kernel()
        kernel.create_task("sleeper", 9, [Compute(5), Sleep(20), Compute(5)])
        kernel.create_task("worker", 2, [Compute(40)])
        kernel.start()
        engine.run()
        self.assertEqual(run_spans(log), [("sleeper", 0, 5), ("worker", 5, 25), ("sleeper", 25, 30), ("worker", 30, 50)])

    def test_guest_must_stay_lowest(self):
        engine, machine, kernel, _ = make_kernel(variant="virtualized")
        kernel.create_guest([Compute(10)])
        with self.assertRaises(SchedulerError):
            kernel.create_task("too-low", 0, [])

    def test_guest_starves_while_rt_task_ready(self):
        engine, machine, kernel, log = make_kernel(variant="virtualized")
        guest = kernel.create_guest([Compute(1000)])
        kernel.create_task("rt", 50, [Compute(300), Sleep(100), Compute(200)])
        kernel.start()
        engine.run()
        guest_spans = [s for s in run_spans(log) if s[0] == "guest"]
        for _, start, stop in guest_spans:
            self.assertTrue(stop <= 300 or start >= 300)
            self.assertFalse(start < 600 and stop > 400)
        self.assertEqual(guest.run_time, 1000)


# -- reference equivalence ---------------------------------------------------

@st.composite
def small_systems(draw):
    n_sems = draw(st.integers(1, 2))
    sem_counts = draw(st.lists(st.integers(0, 1), min_size=n_sems, max_size=n_sems))
    step = st.one_of(
        st.tuples(st.just("compute"), st.integers(1, 20)),
        st.tuples(st.just("wait"), st.integers(0, n_sems - 1)),
        st.tuples(st.just("release"), st.integers(0, n_sems - 1)),
    )
    n_tasks = draw(st.integers(1, 4))
    budget = 50
    tasks = []
    for i in range(n_tasks):
        steps = draw(st.lists(step, max_size=min(8, budget)))
        budget -= len(steps)
        tasks.append((f"T{i}", draw(st.integers(1, 5)), steps))
    times = draw(st.lists(st.integers(0, 120), max_size=min(8, budget)))
    externals = [(t, draw(st.integers(0, n_sems - 1))) for t in sorted(times)]
    return tasks, sem_counts, externals


def simulate_intervals(tasks, sem_counts, externals):
    engine, machine, kernel, log = make_kernel()
    sems = [kernel.create_semaphore(f"s{i}", c) for i, c in enumerate(sem_counts)]
    for name, priority, steps in tasks:
        script = []
        for op, arg in steps:
            if op == "compute":
                script.append(Compute(arg))
            elif op == "wait":
                script.append(Wait(sems[arg].id))
            else:
                script.append(Release(sems[arg].id))
        kernel.create_task(name, priority, script)
    for at, sem in externals:
        engine.schedule(at, EventKind.CUSTOM, callback=lambda e, s=sems[sem]: kernel.sem_release(s))
    kernel.start()
    engine.run()
    return kernel, sems, run_spans(log)


class TestReferenceEquivalence(unittest.TestCase):
    """Randomized systems must schedule exactly like the reference interpreter"""

    @settings(max_examples=500, deadline=None, derandomize=True)
    @given(small_systems())
    def test_run_intervals_match_reference(self, system):
        tasks, sem_counts, externals = system
        kernel, sems, spans = simulate_intervals(tasks, sem_counts, externals)
        self.assertEqual(spans, reference_intervals(tasks, sem_counts, externals))
        for sem in sems:
            self.assertEqual(sem.released + sem_counts[sem.id], sem.acquired + sem.count)
            if sem.count > 0:
                self.assertEqual(sem.waiters, [])

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(small_systems())
    def test_finished_tasks_ran_exactly_their_compute_time(self, system):
        tasks, sem_counts, externals = system
        kernel, sems, spans = simulate_intervals(tasks, sem_counts, externals)
        ran = {}
        for name, start, stop in spans:
            ran[name] = ran.get(name, 0) + stop - start
        for name, _, steps in tasks:
            task = next(t for t in kernel.tasks.values() if t.name == name)
            if task.state == TaskState.FINISHED:
                self.assertEqual(ran.get(name, 0), sum(arg for op, arg in steps if op == "compute"))
        # one CPU: spans never overlap
        for (_, _, stop), (_, next_start, _) in zip(spans, spans[1:]):
            self.assertLessEqual(stop, next_start)


if __name__ == "__main__":
    unittest.main()
