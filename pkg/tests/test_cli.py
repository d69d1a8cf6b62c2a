import json

import numpy as np
import pytest

from halinloop.cli import EXIT_BUDGET, EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, run


@pytest.fixture
def capout(capsys):
    def go(argv, expect=EXIT_OK):
        code = run(argv)
        out = capsys.readouterr().out
        assert code == expect, out
        return out

    return go


class TestEnumerate:
    def test_count_only(self, capout):
        assert capout(["enumerate", "-n", "3", "--count-only"]).strip() == "7"

    def test_listing(self, capout):
        out = capout(["enumerate", "-n", "2"])
        lines = out.strip().splitlines()
        assert lines[0] == "2"
        assert len(lines) == 3

    def test_json_format(self, capout):
        obj = json.loads(capout(["enumerate", "-n", "4", "--count-only", "--format", "json"]))
        assert obj["count"] == 30
        assert obj["config"]["n"] == 4  # resolved config is echoed

    def test_guard_is_usage_error(self, capout):
        capout(["enumerate", "-n", "99"], expect=EXIT_USAGE)


class TestBijection:
    def test_roundtrip_exhaustive(self, capout):
        out = capout(["bij", "roundtrip", "-n", "4", "--exhaustive"])
        assert out.strip() == "30/30 OK"

    def test_phi_inv_are_inverse(self, capout):
        marked = capout(["bij", "phi", "--tree", "2 0 1 0"]).strip()
        tree = capout(["bij", "inv", "--marked", marked]).strip()
        assert tree == "2 0 1 0"

    def test_pushforward(self, capout):
        assert "exact match" in capout(["bij", "pushforward", "-n", "3"])

    def test_bad_marked_tree_is_usage_error(self, capout):
        capout(["bij", "inv", "--marked", "nonsense"], expect=EXIT_USAGE)


class TestGH:
    def test_lemma_smallest(self, capout):
        out = capout(["gh", "lemma", "-n", "1"])
        assert out.strip() == "GH=0.5, bound=1.5, OK"

    def test_lemma_exhaustive(self, capout):
        out = capout(["gh", "lemma", "-n", "2", "--exhaustive"])
        assert out.count("OK") == 2

    def test_exact_from_csv(self, capout, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        np.savetxt(a, np.zeros((1, 1)), delimiter=",")
        np.savetxt(b, np.array([[0.0, 3.0], [3.0, 0.0]]), delimiter=",")
        out = capout(["gh", "exact", "--a", str(a), "--b", str(b)])
        assert "GH=1.5" in out

    def test_budget_exit_code(self, capout, tmp_path):
        d = np.abs(np.subtract.outer(np.arange(12.0), np.arange(12.0)))
        a = tmp_path / "a.csv"
        np.savetxt(a, d, delimiter=",")
        capout(
            ["gh", "exact", "--a", str(a), "--b", str(a), "--budget", "10"],
            expect=EXIT_BUDGET,
        )

    def test_missing_file_is_usage_error(self, capout):
        capout(["gh", "exact", "--a", "/no/such.csv", "--b", "/no/such.csv"],
               expect=EXIT_USAGE)


class TestSampleAndMu:
    def test_sample_deterministic_via_seed_flag(self, capout):
        a = capout(["sample", "-n", "12", "--samples", "2", "--seed", "3"])
        b = capout(["sample", "-n", "12", "--samples", "2", "--seed", "3"])
        assert a == b

    def test_hll_seed_env(self, capout, monkeypatch):
        monkeypatch.setenv("HLL_SEED", "77")
        a = capout(["sample", "-n", "12"])
        b = capout(["sample", "-n", "12", "--seed", "77"])
        assert a == b

    def test_sample_as_map(self, capout):
        out = capout(["sample", "-n", "6", "--samples", "1", "--seed", "0", "--as-map"])
        assert ":" in out  # marked-tree format

    def test_mu_table(self, capout):
        out = capout(["mu", "--alpha", "1.5", "--kmax", "2"])
        assert out.splitlines()[0].startswith("mu(0) =")

    def test_impossible_size_is_usage_error(self, capout):
        capout(["sample", "-n", "0"], expect=EXIT_USAGE)


class TestLoopAndRender:
    def test_loop_summary(self, capout):
        out = capout(["loop", "--tree", "3 0 0 0"])
        assert "vertices=4" in out and "diameter=2" in out

    def test_loop_distances_csv(self, capout):
        out = capout(["loop", "--tree", "3 0 0 0", "--distances", "--format", "csv"])
        rows = [r.split(",") for r in out.strip().splitlines()]
        assert len(rows) == 4 and rows[0][2] == "2"

    def test_render_dot(self, capout):
        out = capout(["render", "looptree", "--tree", "3 0 0 0", "--format", "dot"])
        assert out.startswith("graph looptree {")

    def test_bad_tree_is_usage_error(self, capout):
        capout(["loop", "--tree", "2 0"], expect=EXIT_USAGE)


class TestExp:
    def test_scaling_csv(self, capout):
        out = capout(
            ["exp", "scaling", "--sizes", "16,32", "--samples", "3",
             "--seed", "1", "--format", "csv"]
        )
        lines = out.strip().splitlines()
        assert lines[0] == "n,seed,sample,height,diam_loop,max_jump,b_n"
        assert len(lines) == 7

    def test_scaling_out_file_atomic(self, capout, tmp_path):
        out_file = tmp_path / "r.csv"
        capout(
            ["exp", "scaling", "--sizes", "16", "--samples", "2", "--seed", "1",
             "--format", "csv", "--out", str(out_file)]
        )
        assert out_file.read_text().startswith("n,seed,sample")

    def test_lukasiewicz(self, capout):
        out = capout(
            ["exp", "lukasiewicz", "--sizes", "16,32", "--samples", "5",
             "--seed", "2", "--format", "json"]
        )
        assert "ks_consecutive" in out


class TestGlobalBehavior:
    def test_unknown_subcommand_is_usage(self, capout):
        capout(["frobnicate"], expect=EXIT_USAGE)

    def test_unknown_flag_is_usage(self, capout):
        capout(["enumerate", "-n", "2", "--bogus"], expect=EXIT_USAGE)

    def test_help_exits_zero(self, capout):
        for sub in ("enumerate", "sample", "bij", "gh", "loop", "exp", "render", "mu"):
            assert run([sub, "--help"]) == EXIT_OK

    def test_version(self, capsys):
        assert run(["--version"]) == EXIT_OK
