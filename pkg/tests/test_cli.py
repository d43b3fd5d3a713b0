import csv
import json

import numpy as np
import pytest

from displaylab.cli import main


def write_spec(tmp_path, **overrides):
    spec = {
        "n_samples": 160,
        "positive_fraction": 0.2,
        "n_modes_per_class": 2,
        "feature_dim": 4,
        "seed": 2,
    }
    spec.update(overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestGenerate:
    def test_writes_dataset_and_prints_count(self, tmp_path, capsys):
        out = tmp_path / "data.csv"
        code = main(
            ["generate", "--n-samples", "50", "--positive-fraction", "0.2",
             "--modes", "2", "--out", str(out)]
        )
        assert code == 0
        assert out.exists()
        assert "50" in capsys.readouterr().out
        rows = read_csv(out)
        assert len(rows) == 51  # header + samples

    def test_spec_file(self, tmp_path):
        spec = write_spec(tmp_path)
        out = tmp_path / "data.jsonl"
        assert main(["generate", "--spec", str(spec), "--out", str(out)]) == 0
        assert len(out.read_text().strip().splitlines()) == 160


class TestRunOne:
    def test_produces_run_csv(self, tmp_path):
        spec = write_spec(tmp_path)
        out = tmp_path / "run.csv"
        code = main(
            ["run-one", "--synthetic", str(spec), "--strategy", "uncertainty",
             "--seed", "3", "--display-size", "4", "--iterations", "3",
             "--out", str(out)]
        )
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["iteration", "samp_percent", "strategy", "action", "reward", "eer"]
        assert len(rows) == 4  # header + 3 iterations

    def test_unknown_strategy_is_usage_error(self, tmp_path):
        spec = write_spec(tmp_path)
        with pytest.raises(SystemExit) as exc:
            main(["run-one", "--synthetic", str(spec), "--strategy", "bogus",
                  "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2

    def test_missing_source_fails(self, tmp_path):
        code = main(
            ["run-one", "--strategy", "random", "--out", str(tmp_path / "x.csv")]
        )
        assert code == 1


class TestBenchmark:
    def run_benchmark(self, tmp_path, out_name):
        spec = write_spec(tmp_path)
        out = tmp_path / out_name
        code = main(
            ["benchmark", "--synthetic", str(spec),
             "--strategies", "random,uncertainty", "--seeds", "1,2",
             "--display-size", "4", "--iterations", "3", "--out", str(out)]
        )
        assert code == 0
        return out

    def test_layout_and_summary_shape(self, tmp_path):
        out = self.run_benchmark(tmp_path, "bench")
        assert (out / "random" / "1.csv").exists()
        assert (out / "random" / "2.csv").exists()
        assert (out / "uncertainty" / "1.csv").exists()
        rows = read_csv(out / "summary.csv")
        assert rows[0] == ["strategy", "iter_1", "iter_2", "iter_3", "auc"]
        assert len(rows) == 3  # header + 2 strategies
        assert [r[0] for r in rows[1:]] == ["random", "uncertainty"]

    def test_rerun_is_bitwise_identical(self, tmp_path):
        a = self.run_benchmark(tmp_path, "bench_a")
        b = self.run_benchmark(tmp_path, "bench_b")
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()
        assert (a / "random" / "1.csv").read_bytes() == (b / "random" / "1.csv").read_bytes()

    def test_summary_equals_mean_of_run_files(self, tmp_path):
        out = self.run_benchmark(tmp_path, "bench_mean")
        summary = {r[0]: r[1:] for r in read_csv(out / "summary.csv")[1:]}
        for strategy in ("random", "uncertainty"):
            per_iter = []
            for seed in (1, 2):
                rows = read_csv(out / strategy / f"{seed}.csv")[1:]
                per_iter.append([float(r[5]) for r in rows])
            means = np.mean(np.asarray(per_iter), axis=0)
            got = [float(v) for v in summary[strategy][:-1]]
            np.testing.assert_allclose(got, means, atol=1e-12)
            auc = float(summary[strategy][-1])
            assert auc == pytest.approx(float(np.mean(means)), abs=1e-12)

    def test_unknown_strategy_exits_2(self, tmp_path):
        spec = write_spec(tmp_path)
        with pytest.raises(SystemExit) as exc:
            main(["benchmark", "--synthetic", str(spec), "--strategies",
                  "random,bogus", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2

    def test_bad_seed_list_exits_2(self, tmp_path):
        spec = write_spec(tmp_path)
        with pytest.raises(SystemExit) as exc:
            main(["benchmark", "--synthetic", str(spec), "--seeds", "x..y",
                  "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
