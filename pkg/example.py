"""
Example use of irqsim as a library.
Run with: python example.py

Builds a custom loaded scenario, runs it under both dispatch architectures,
then prints the comparison table and a few counters from each run.
"""
from irqsim import (
    ArchConfig,
    CostModel,
    LoadSpec,
    MeasureConfig,
    build_report,
    render_table,
    run_scenario,
    shifted_exponential,
    uniform,
    constant,
)
from irqsim.models.scenario import NetStorm, SerialCopier

# A short measurement: 5000 timer interrupts at 4 kHz
measure = MeasureConfig(interrupt_count=5000, rate_hz=4000, seed=2024)

# Both background loads on, with their default parameters
load = LoadSpec(
    net_storm=NetStorm(enabled=True),
    serial_copier=SerialCopier(enabled=True),
)

# Direct dispatch: the RTOS owns the interrupt controller
direct = ArchConfig(
    variant="direct",
    costs=CostModel(
        isr_entry=uniform(1100, 1500),
        isr_body={"timer": constant(500)},
        hard_mask_sections={"kernel-sync": shifted_exponential(500, 2000)},
        mask_cap=18_000,
        sched_decide=500,
        context_cost=uniform(500, 700),
    ),
)

# Virtualized dispatch: a real-time core sits under a guest that only soft-masks
virtualized = ArchConfig(
    variant="virtualized",
    costs=CostModel(
        isr_entry=uniform(1400, 2000),
        isr_body={"timer": constant(1000)},
        pending_mgmt=2000,
        soft_toggle=200,
        hard_mask_sections={"rt-core": shifted_exponential(500, 30_000)},
        mask_cap=195_000,
        sched_decide=1500,
        context_cost=uniform(2500, 3700),
    ),
)

reports = []
for name, arch in (("custom-direct", direct), ("custom-virtualized", virtualized)):
    raw = run_scenario(arch, load, measure, name=name)
    report = build_report(raw.scenario, raw.samples, raw.counters)
    reports.append(report)
    print(f"{name}: {raw.counters['events']} events, {raw.counters['net-arrivals']} packets, "
          f"{raw.counters['context-switches']} context switches, hard limit ok: {report.hard_limit_ok}")

print()
print(render_table(reports), end="")
