"""Panel partition, adequacy, and donated summaries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idss.defaults import default_network, default_panels
from idss.errors import InvalidInput, MissingInput
from idss.panels import Panel, check_adequacy, check_partition, donate_summaries

from oracles import partition_violations


def panel(pid, nodes, inputs=()):
    return Panel(id=pid, label=pid, nodes=frozenset(nodes), inputs=frozenset(inputs))


class TestPanelInvariants:
    def test_empty_panel_rejected(self):
        with pytest.raises(InvalidInput):
            panel("G1", [])

    def test_inputs_disjoint_from_nodes(self):
        with pytest.raises(InvalidInput):
            panel("G1", ["A"], inputs=["A"])


class TestPartition:
    def test_default_configuration_passes(self):
        report = check_partition(default_panels(), default_network())
        assert report.ok
        assert report.violations() == []

    def test_overlapping_ownership_flagged(self):
        spec = default_network()
        panels = default_panels()
        extra = panel("GX", ["Health"])  # Health already owned by G0
        report = check_partition(panels + [extra], spec)
        assert not report.ok
        assert report.overlap == {"Health": ["G0", "GX"]}

    def test_uncovered_node_flagged(self):
        spec = default_network()
        panels = [p for p in default_panels() if p.id != "G9"]  # drops GDP
        report = check_partition(panels, spec)
        assert not report.ok
        assert report.uncovered == ["GDP"]

    def test_unknown_panel_node_flagged(self):
        spec = default_network()
        report = check_partition(default_panels() + [panel("GX", ["Ghost"])], spec)
        assert not report.ok
        assert report.unknown == ["Ghost"]

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_agrees_with_set_arithmetic(self, data):
        universe = [f"n{i}" for i in range(data.draw(st.integers(1, 17)))]
        n_panels = data.draw(st.integers(1, 9))
        assignments = {}
        for pid in range(n_panels):
            members = data.draw(
                st.lists(st.sampled_from(universe), min_size=1, max_size=6, unique=True)
            )
            assignments[f"G{pid}"] = set(members)
        spec_nodes = data.draw(
            st.lists(st.sampled_from(universe), min_size=1, unique=True)
        )
        from idss.network import NetworkSpec
        from idss.dlm import NodeModel

        spec = NetworkSpec(
            nodes=spec_nodes,
            edges=[],
            node_models={n: NodeModel(node=n) for n in spec_nodes},
            panel_of={},
        )
        panels = [panel(pid, nodes) for pid, nodes in assignments.items()]
        report = check_partition(panels, spec)
        ref = partition_violations(assignments, set(spec_nodes))
        assert report.overlap == ref["overlap"]
        assert report.uncovered == ref["uncovered"]
        assert report.unknown == ref["unknown"]
        assert report.ok == (
            not ref["overlap"] and not ref["uncovered"] and not ref["unknown"]
        )


class TestAdequacy:
    def test_default_configuration_passes(self):
        report = check_adequacy(default_panels(), default_network())
        assert report.ok, report.violations()

    def test_removing_owner_breaks_consumers(self):
        spec = default_network()
        panels = [p for p in default_panels() if p.id != "G9"]
        report = check_adequacy(panels, spec)
        assert not report.ok
        needy = {(m["node"], m["parent"]) for m in report.missing}
        assert ("Unemployment", "GDP") in needy
        assert ("FImports", "GDP") in needy

    def test_undeclared_cross_panel_input_flagged(self):
        spec = default_network()
        panels = []
        for p in default_panels():
            if p.id == "G2":
                panels.append(
                    Panel(id="G2", label=p.label, nodes=p.nodes,
                          inputs=p.inputs - {"CEnergy"})
                )
            else:
                panels.append(p)
        report = check_adequacy(panels, spec)
        assert not report.ok
        assert any(
            m["node"] == "CFood" and m["parent"] == "CEnergy" and m["reason"] == "undeclared input"
            for m in report.missing
        )

    def test_single_panel_owning_everything_is_adequate(self):
        spec = default_network()
        one = panel("ALL", spec.nodes)
        assert check_adequacy([one], spec).ok

    def test_adding_inputs_is_monotone(self):
        # a passing configuration never breaks when a panel declares more inputs
        spec = default_network()
        panels = default_panels()
        assert check_adequacy(panels, spec).ok
        widened = [
            Panel(id=p.id, label=p.label, nodes=p.nodes,
                  inputs=p.inputs | ({"GDP"} - p.nodes))
            for p in panels
        ]
        assert check_adequacy(widened, spec).ok


class TestDonateSummaries:
    def test_supplied_observed_values_reproduce_forecasts(self, bundled, fitted_default):
        parsed, table = bundled
        g2 = next(p for p in default_panels() if p.id == "G2")
        supplied = {name: table.columns[name] for name in g2.inputs}
        bundle = donate_summaries(g2, fitted_default, supplied)
        fs = fitted_default.fits["CFood"].filter_state
        np.testing.assert_allclose(bundle.mean["CFood"], fs.f, atol=1e-10)
        np.testing.assert_allclose(bundle.variance["CFood"], fs.q, atol=1e-10)

    def test_root_panel_is_unconditional(self, fitted_default):
        g9 = next(p for p in default_panels() if p.id == "G9")
        bundle = donate_summaries(g9, fitted_default, {})
        fs = fitted_default.fits["GDP"].filter_state
        np.testing.assert_allclose(bundle.mean["GDP"], fs.f, atol=1e-12)
        assert (bundle.variance["GDP"] > 0).all()

    def test_missing_input_rejected(self, fitted_default):
        g2 = next(p for p in default_panels() if p.id == "G2")
        with pytest.raises(MissingInput):
            donate_summaries(g2, fitted_default, {})

    def test_degenerate_node_donates_zero_variance(self):
        import numpy as np

        from idss.catalog import TimeSeriesTable
        from idss.network import fit_network
        from test_network import make_spec, tiny_model

        y = np.full(5, 2.5)
        table = TimeSeriesTable(years=list(range(2000, 2005)), columns={"X": y})
        models = {"X": tiny_model("X", prior_cov=0.0, prior_mean=np.array([2.5]),
                                  fixed_obs_variance=1e-18)}
        fitted = fit_network(make_spec(["X"], [], models), table)
        bundle = donate_summaries(panel("G1", ["X"]), fitted, {})
        np.testing.assert_allclose(bundle.variance["X"], 0.0, atol=1e-12)
        np.testing.assert_allclose(bundle.mean["X"], 2.5, atol=1e-12)

    def test_pure_function_repeat_calls_identical(self, bundled, fitted_default):
        parsed, table = bundled
        g0 = next(p for p in default_panels() if p.id == "G0")
        supplied = {name: table.columns[name] for name in g0.inputs}
        a = donate_summaries(g0, fitted_default, supplied)
        b = donate_summaries(g0, fitted_default, supplied)
        for node in a.mean:
            np.testing.assert_array_equal(a.mean[node], b.mean[node])
            np.testing.assert_array_equal(a.variance[node], b.variance[node])

    def test_counterfactual_inputs_shift_the_mean(self, bundled, fitted_default):
        parsed, table = bundled
        g0 = next(p for p in default_panels() if p.id == "G0")
        supplied = {name: table.columns[name].copy() for name in g0.inputs}
        base = donate_summaries(g0, fitted_default, supplied)
        supplied["CFood"] = supplied["CFood"] * 1.25
        shifted = donate_summaries(g0, fitted_default, supplied)
        # positive food-cost effect: conditional forecasts move up
        assert (shifted.mean["Health"][3:] > base.mean["Health"][3:]).all()
