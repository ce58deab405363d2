import csv
import json

import numpy as np
import pytest

from nroll.errors import DivergedError
from nroll.groupnet import IterationRecord
from nroll.learner import Agent, MarginConfig, load_checkpoint
from nroll.loop import LOOPS_CSV_COLUMNS, LoopMetrics
from nrolltools.config import ExperimentConfig, from_dict
from nrolltools.report import build_report, render_report_md
from nrolltools.rundir import RunDir, json_line

pytestmark = [pytest.mark.unit]


def _record(i: int) -> IterationRecord:
    return IterationRecord(
        iteration=i, warmup=i == 0, lr=0.1, r_percent=20.0, mean_loss=[1.5, 1.25],
        group_loss=[None, 2.0], hc=10, mc_ms=[1, 2], permutation=[1, 0],
    )


class TestRunDir:
    def test_prepare_clears_previous_artifacts_only(self, tmp_path):
        rd = RunDir(tmp_path / "r").prepare()
        (rd.path / "train.jsonl").write_text("old\n")
        (rd.path / "loop_1").mkdir()
        (rd.path / "loop_1" / "agent_0.gnckpt").write_bytes(b"x")
        (rd.path / "data").mkdir()
        (rd.path / "data" / "train.csv").write_text("keep\n")
        rd.prepare()
        assert not (rd.path / "train.jsonl").exists()
        assert not (rd.path / "loop_1").exists()
        assert (rd.path / "data" / "train.csv").read_text() == "keep\n"

    def test_train_log_lines(self, tmp_path):
        with RunDir(tmp_path).prepare() as rd:
            rd.log_record(0, _record(0))
            rd.log_record(2, _record(1))
        lines = (tmp_path / "train.jsonl").read_text().splitlines()
        assert len(lines) == 2
        first, second = (json.loads(s) for s in lines)
        assert first["t"] == 0 and first["warmup"] is True
        assert second["t"] == 2 and second["group_loss"] == [None, 2.0]
        assert list(first) == sorted(first)

    def test_events(self, tmp_path):
        with RunDir(tmp_path).prepare() as rd:
            rd.log_event(3, "loop 3: threshold lowered")
        assert json.loads((tmp_path / "events.jsonl").read_text()) == {"t": 3, "message": "loop 3: threshold lowered"}

    def test_loops_csv(self, tmp_path):
        m = LoopMetrics(t=1, labelled_size=120, r_est=12.5, r_train=12.5, threshold=0.8, added=20, dropped=4,
                        confident_fraction=20 / 24, pseudo_acc=None)
        with RunDir(tmp_path).prepare() as rd:
            rd.start_loops_csv(LOOPS_CSV_COLUMNS)
            rd.log_loop_row(m.csv_row())
        with open(tmp_path / "loops.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1
        assert list(rows[0]) == list(LOOPS_CSV_COLUMNS)
        assert rows[0]["labelled_size"] == "120"
        assert rows[0]["r_est"] == "12.5"
        assert rows[0]["pseudo_acc"] == ""

    def test_histogram(self, tmp_path):
        rd = RunDir(tmp_path).prepare()
        p = rd.write_histogram(2, np.array([-1.0, 0.0, 0.995, 1.0]))
        assert p == tmp_path / "loop_2" / "similarity_hist.csv"
        lines = p.read_text().splitlines()
        assert lines[0] == "bin_center,count"
        assert len(lines) == 101
        assert lines[1] == "-0.99,1"
        assert lines[-1] == "0.99,2"
        assert rd.write_histogram(None, np.zeros(3)) == tmp_path / "similarity_hist.csv"
        assert rd.write_histogram(0, None) is None

    def test_checkpoints(self, tmp_path):
        agents = [Agent.create(m, [4, 6, 3], 5, seed=m + 1) for m in range(2)]
        rd = RunDir(tmp_path).prepare()
        paths = rd.save_agents(1, agents, MarginConfig())
        assert [p.name for p in paths] == ["agent_0.gnckpt", "agent_1.gnckpt"]
        params, header = load_checkpoint(paths[1])
        assert header.num_classes == 5
        np.testing.assert_allclose(params.head.W, agents[1].params.head.W, atol=1e-6)

    def test_abort_points_at_last_checkpoint(self, tmp_path):
        class State:
            def to_json(self):
                return {"t": 2, "labelled_size": 50}

        rd = RunDir(tmp_path).prepare()
        rd.save_agents(1, [Agent.create(0, [4, 3], 2, seed=1)], MarginConfig())
        p = rd.write_abort(DivergedError("gradient is not finite"), State())
        payload = json.loads(p.read_text())
        assert payload["kind"] == "DivergedError"
        assert payload["error"].startswith("diverged")
        assert payload["last_checkpoint_loop"] == 1
        assert payload["state"] == {"t": 2, "labelled_size": 50}

    def test_json_handles_numpy(self):
        assert json_line({"b": np.float64(0.5), "a": np.arange(2)}) == '{"a": [0, 1], "b": 0.5}\n'


class TestReport:
    def test_markdown(self):
        cfg = from_dict(ExperimentConfig, {"name": "demo", "noise": {"rate": 0.5}})
        loops = [
            LoopMetrics(t=0, labelled_size=100, r_est=40.0, r_train=40.0, threshold=0.8, test_acc=0.5).to_json(),
            LoopMetrics(t=1, labelled_size=150, r_est=30.0, r_train=30.0, threshold=0.8, added=50, test_acc=0.625).to_json(),
        ]
        final = {
            "test_accuracy": 0.625, "verification_accuracy": 0.8, "verification_threshold": 0.25,
            "tpr_at_fpr": {"0.1": 0.5}, "rank1": 0.75,
        }
        report = build_report(cfg, "nroll", final=final, loops=loops, events=["loop 1: degenerate GMM fit"])
        md = render_report_md(cfg, report)
        assert md.startswith("# Run `demo`")
        assert "- label noise: 50% symmetric" in md
        assert report["rate_mode"] == "sample"
        assert "- noise rate estimate: per-sample rate 1 - sqrt(1 - w) (`rate_mode: sample`)" in md
        assert "| 1 | 150 | 30.00 | 30.00 | 50 | 0 | 0.800 | n/a | 62.50% |" in md
        assert "| TPR @ FPR=0.1 | 50.00% |" in md
        assert "- loop 1: degenerate GMM fit" in md
        assert md.endswith("\n")

    def test_sections_are_optional(self):
        cfg = ExperimentConfig()
        md = render_report_md(cfg, build_report(cfg, "gen-data"))
        assert "## Loops" not in md
        assert "## Final evaluation" not in md
        assert "## Events" not in md

    def test_pair_rate_mode_is_named(self):
        cfg = from_dict(ExperimentConfig, {"noise_estimator": {"rate_mode": "pair"}})
        report = build_report(cfg, "train")
        assert report["rate_mode"] == "pair"
        assert "- noise rate estimate: pair-level weight w (`rate_mode: pair`)" in render_report_md(cfg, report)
