from pathlib import Path

import numpy as np
import pytest

from nroll.datasets import gen_synthetic, inject_noise, load_csv, write_csv
from nroll.errors import DatasetParseError

pytestmark = [pytest.mark.unit]


def _write(tmp_path: Path, text: str) -> Path:
    p = tmp_path / "data.csv"
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCsv:
    def test_empty_after_header(self, tmp_path):
        data = load_csv(_write(tmp_path, "id,label,gt_label,f0,f1\n"))
        assert len(data) == 0 and data.dim == 2

    def test_row_without_truth(self, tmp_path):
        data = load_csv(_write(tmp_path, "id,label,gt_label,f0,f1\n7,2,,0.1,0.2\n"))
        assert data.ids.tolist() == [7]
        assert data.labels.tolist() == [2]
        assert data.gt_labels.tolist() == [-1]
        assert data.features.tolist() == [[0.1, 0.2]]

    def test_round_trip(self, tmp_path):
        data = inject_noise(gen_synthetic(4, 5, 3, 0.3, seed=2), 0.5, seed=0)
        loaded = load_csv(write_csv(data, tmp_path / "d.csv"), num_classes=4)
        assert loaded.equals(data)

    @pytest.mark.parametrize(
        "body,line",
        [
            ("1,0,,0.5\n", 2),
            ("1,0,,0.5,0.1\n2,0,,abc,0.1\n", 3),
            ("1,0,,0.5,0.1\n1,1,,0.5,0.1\n", 3),
            ("x,0,,0.5,0.1\n", 2),
        ],
    )
    def test_parse_errors_carry_line(self, tmp_path, body, line):
        with pytest.raises(DatasetParseError) as e:
            load_csv(_write(tmp_path, "id,label,gt_label,f0,f1\n" + body))
        assert e.value.line == line

    def test_bad_header(self, tmp_path):
        with pytest.raises(DatasetParseError):
            load_csv(_write(tmp_path, "id,label,f0\n"))
