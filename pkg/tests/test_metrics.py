import pytest

from xorcast.engine import (DtMode, LoadScenario, Scenario, WorkloadPacket,
                            build_workload, run_broadcast)
from xorcast.metrics import (aggregate, class_gain, gain_from_log,
                             overall_gain, render_table)
from xorcast.pruning import PruningProtocol
from xorcast.topology import from_edges, generate_connected_topology


class TestClassGain:
    def test_one_merge_of_two(self):
        assert class_gain(9, 2, 1) == pytest.approx(9 / 8)

    def test_everything_in_one_coded_send(self):
        assert class_gain(9, 9, 1) == 9

    def test_no_coding_is_unity(self):
        assert class_gain(17, 0, 0) == 1.0

    def test_empty_class_is_unity(self):
        assert class_gain(0, 0, 0) == 1.0

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            class_gain(-1, 0, 0)

    def test_rejects_ncp_above_total(self):
        with pytest.raises(ValueError):
            class_gain(3, 4, 1)

    def test_monotone_in_merged_count(self):
        gains = [class_gain(9, k, 1) for k in range(2, 10)]
        assert gains == sorted(gains)
        assert all(g >= 1 for g in gains)


class TestOverallGain:
    def test_unity(self):
        assert overall_gain(1, 1) == 1

    def test_mean(self):
        assert overall_gain(9, 1) == 5

    def test_relay_pair(self):
        assert overall_gain(4 / 3, 4 / 3) == pytest.approx(4 / 3)


class TestGainFromLog:
    def alice_and_bob(self, coding):
        t = from_edges(3, [(0, 1), (1, 2)])
        wl = (WorkloadPacket(0, 0, 60, 1.0), WorkloadPacket(1, 2, 60, 1.0))
        sc = Scenario(topology=t, protocol=PruningProtocol.DP,
                      coding_enabled=coding, source=0, workload=wl,
                      possession_seed=11, prob_gate=0.0, guess_threshold=1.0)
        return sc, *run_broadcast(sc)

    def test_relay_gain(self):
        sc, log, rm = self.alice_and_bob(coding=True)
        recomputed = gain_from_log(log, sc.workload)
        assert recomputed.gain_small == pytest.approx(4 / 3)
        assert recomputed.total_sends == 3

    def test_coding_off_gains_are_unity(self):
        sc, log, rm = self.alice_and_bob(coding=False)
        recomputed = gain_from_log(log, sc.workload)
        assert recomputed.gain_small == 1.0
        assert recomputed.gain_big == 1.0
        assert recomputed.gain_overall == 1.0

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("coding", [False, True])
    def test_recomputation_matches_engine(self, seed, coding):
        t = generate_connected_topology(20, 1000.0, 300.0, seed)
        wl = build_workload(9, LoadScenario.MIXED, 0, DtMode.WITH, seed)
        sc = Scenario(topology=t, protocol=PruningProtocol.TDP,
                      coding_enabled=coding, source=0, workload=wl,
                      possession_seed=seed)
        log, rm = run_broadcast(sc)
        assert gain_from_log(log, wl).count_fields() == rm.count_fields()


def _row(protocol="dp", nodes=40, seed=0, gain=1.5, sends=30, fwd=10):
    return {"protocol": protocol, "nodes": nodes, "seed": seed,
            "coding": "on", "load": "low", "dt_mode": "with",
            "total_sends": sends, "forwarder_count": fwd,
            "gain_big": gain, "gain_small": gain, "gain_overall": gain,
            "delivered": True}


class TestAggregate:
    def test_single_run_mean_is_that_run(self):
        out = aggregate([_row()], ("protocol", "nodes"))
        assert len(out) == 1
        assert out[0]["mean_gain_overall"] == 1.5
        assert out[0]["min_total_sends"] == 30

    def test_group_by_node_count_shapes_table(self):
        rows = [_row(nodes=n, seed=s) for n in range(5, 45, 5)
                for s in range(3)]
        out = aggregate(rows, ("nodes",))
        assert len(out) == 8
        assert all(r["runs"] == 3 for r in out)

    def test_mean_over_group(self):
        rows = [_row(gain=1.0), _row(gain=2.0, seed=1)]
        out = aggregate(rows, ("protocol",))
        assert out[0]["mean_gain_overall"] == 1.5
        assert out[0]["max_gain_overall"] == 2.0

    def test_empty_is_an_error(self):
        with pytest.raises(ValueError):
            aggregate([], ("protocol",))


def test_render_table_layout():
    rows = aggregate([_row(), _row(protocol="tdp", gain=2.0)],
                     ("protocol",))
    text = render_table(rows, ["protocol", "runs", "mean_gain_overall"])
    lines = text.splitlines()
    assert lines[0].split() == ["protocol", "runs", "mean_gain_overall"]
    assert len(lines) == 4  # header, separator, two groups
    assert "2.0000" in text
