#!/usr/bin/env python3
"""
Tests for scenario files: parsing, validation errors and the shipped presets.

Run with: python -m unittest test_scenario
"""
import json
import logging
import pickle
import unittest

from irqsim.exceptions import BadUnit, BadValue, ConfigError, ParseError, PastDue, ScenarioError, UnknownKey
from irqsim.models.distributions import ShiftedExponentialDist, UniformDist
from irqsim.models.scenario import parse_scenario, render_scenario
from irqsim.presets import CORE_PRESETS, PTHREADS_PRESETS, VXWORKS_PRESETS, load_preset, preset_names, preset_text

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MINIMAL = {
    "name": "mini",
    "arch": {
        "variant": "direct",
        "costs": {
            "isr_entry": {"kind": "uniform", "lo": "1.1us", "hi": "1.5us"},
            "mask_cap": "18us",
        },
    },
    "measure": {"interrupt_count": 500, "rate_hz": 4000, "seed": 3},
}


def with_change(path, value):
    doc = json.loads(json.dumps(MINIMAL))
    node = doc
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value
    return json.dumps(doc)


class TestParseScenario(unittest.TestCase):
    """Scenario parsing and validation"""

    def test_minimal_document(self):
        scenario = parse_scenario(json.dumps(MINIMAL))
        self.assertEqual(scenario.name, "mini")
        self.assertEqual(scenario.arch.costs.isr_entry, UniformDist(lo=1100, hi=1500))
        self.assertEqual(scenario.arch.costs.mask_cap, 18_000)
        self.assertEqual(scenario.measure.interrupt_count, 500)
        self.assertEqual(scenario.measure.warmup_discard, 16)
        self.assertTrue(scenario.load.idle)

    def test_negative_rate(self):
        with self.assertRaises(BadValue) as ctx:
            parse_scenario(with_change(["measure", "rate_hz"], -4))
        self.assertEqual(ctx.exception.location, "measure.rate_hz")

    def test_duration_without_unit(self):
        with self.assertRaises(BadUnit):
            parse_scenario(with_change(["arch", "costs", "mask_cap"], "250"))
        with self.assertRaises(BadUnit):
            parse_scenario(with_change(["arch", "costs", "mask_cap"], 250))

    def test_unknown_key(self):
        with self.assertRaises(UnknownKey) as ctx:
            parse_scenario(with_change(["measure", "sead"], 1))
        self.assertIn("sead", str(ctx.exception))

    def test_unknown_subsystem(self):
        with self.assertRaises(BadValue):
            parse_scenario(with_change(["arch", "costs", "hard_mask_sections"], {"disk": {"kind": "constant", "value": "1us"}}))

    def test_bad_distribution(self):
        with self.assertRaises(BadValue):
            parse_scenario(with_change(["arch", "costs", "isr_entry"], {"kind": "uniform", "lo": "2us", "hi": "1us"}))

    def test_missing_variant(self):
        doc = json.loads(json.dumps(MINIMAL))
        del doc["arch"]["variant"]
        with self.assertRaises(BadValue):
            parse_scenario(json.dumps(doc))

    def test_priority_ordering_enforced(self):
        text = with_change(["load", "net_storm"], {"enabled": True, "task_priority": 300})
        with self.assertRaises(BadValue):
            parse_scenario(text)

    def test_not_json(self):
        with self.assertRaises(ParseError):
            parse_scenario("{name: ")
        with self.assertRaises(ParseError):
            parse_scenario("[1, 2]")

    def test_errors_share_a_base(self):
        for exc in (ParseError, UnknownKey, BadUnit, BadValue):
            self.assertTrue(issubclass(exc, ScenarioError))
        err = BadUnit("no unit", location="arch.costs.mask_cap")
        self.assertEqual(err.to_dict()["location"], "arch.costs.mask_cap")

    def test_errors_survive_pickling(self):
        for err in (
            BadUnit("no unit", location="arch.costs.mask_cap"),
            ConfigError("rate_hz must be positive"),
            PastDue("due 5 before now 9"),
        ):
            copy = pickle.loads(pickle.dumps(err))
            self.assertIs(type(copy), type(err))
            self.assertEqual(str(copy), str(err))
            self.assertEqual(copy.to_dict(), err.to_dict())
            self.assertEqual(copy.exit_code, err.exit_code)

    def test_render_then_parse_is_identity(self):
        scenario = parse_scenario(json.dumps(MINIMAL))
        self.assertEqual(parse_scenario(render_scenario(scenario)), scenario)


class TestPresets(unittest.TestCase):
    """Shipped presets"""

    def test_all_presets_listed(self):
        self.assertEqual(sorted(preset_names()), sorted(CORE_PRESETS + PTHREADS_PRESETS + VXWORKS_PRESETS))

    def test_presets_parse(self):
        for name in preset_names():
            scenario = load_preset(name)
            self.assertEqual(scenario.name, name)
            self.assertEqual(scenario.measure.interrupt_count, 100_000)
            self.assertEqual(scenario.measure.rate_hz, 4000)
            self.assertEqual(scenario.load.idle, name.endswith("-idle"))
            self.assertEqual(scenario.arch.variant, name.split("-")[0])

    def test_virtualized_cost_model(self):
        costs = load_preset("virtualized-loaded").arch.costs
        self.assertEqual(costs.mask_cap, 195_000)
        self.assertEqual(costs.hard_mask_sections["rt-core"], ShiftedExponentialDist(min=500, mean=30_000))
        self.assertEqual(costs.pending_mgmt, 2000)

    def test_idle_direct_presets_have_no_unused_sections(self):
        for name in ("direct-idle", "direct-pthreads-idle", "direct-vxworks-idle"):
            self.assertEqual(load_preset(name).arch.costs.hard_mask_sections, {}, msg=name)

    def test_vxworks_cost_model(self):
        idle = load_preset("direct-vxworks-idle").arch.costs
        loaded = load_preset("direct-vxworks-loaded").arch.costs
        self.assertEqual(idle.isr_entry, UniformDist(lo=1650, hi=2350))
        self.assertEqual(idle.context_cost, UniformDist(lo=650, hi=1350))
        self.assertEqual(idle.sched_decide, 600)
        self.assertEqual(loaded.mask_cap, 23_000)
        self.assertEqual(loaded.hard_mask_sections["kernel-sync"], ShiftedExponentialDist(min=1000, mean=3000))
        self.assertEqual(idle.model_copy(update={"hard_mask_sections": loaded.hard_mask_sections}), loaded)

    def test_unknown_preset(self):
        with self.assertRaises(ConfigError):
            preset_text("nosuch")


if __name__ == "__main__":
    unittest.main()
