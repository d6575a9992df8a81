import json
import os

import pytest

from config.settings import FIXTURE_DIR
from main import EXIT_FAIL, EXIT_INVALID, EXIT_MATERIALIZATION, EXIT_PASS, main, parse_arguments

U3 = os.path.join(FIXTURE_DIR, "fix_u3.json")
QUIET = ["--quiet", "--log-level", "ERROR", "--no-timing"]


def verify(*args):
    return main(["verify", "--fixture", U3, "--bound", "1", "--threads", "2", *QUIET, *args])


class TestArguments:
    def test_defaults(self):
        args = parse_arguments(["verify", "--fixture", U3])
        assert args.suite == "all"
        assert args.format == "text"
        assert args.bound is None

    @pytest.mark.parametrize("argv", [
        ["verify", "--fixture", U3, "--bound", "-1"],
        ["verify", "--fixture", U3, "--threads", "0"],
        ["construct", "--fixture", U3, "--target", "nothing"],
        ["verify"],
    ])
    def test_rejected(self, argv):
        with pytest.raises(SystemExit) as excinfo:
            parse_arguments(argv)
        assert excinfo.value.code == 2


class TestVerify:
    def test_category_suite_passes(self, capsys):
        assert verify("--suite", "category") == EXIT_PASS
        out = capsys.readouterr().out
        assert out.rstrip().splitlines()[-1].startswith("PASS: FIX-U3 [category]")

    def test_structured_output_is_reproducible(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert verify("--suite", "juniv", "--format", "structured", "--out", str(first)) == EXIT_PASS
        assert verify("--suite", "juniv", "--format", "structured", "--out", str(second)) == EXIT_PASS
        assert first.read_text() == second.read_text()
        data = json.loads(first.read_text())
        assert data["metadata"]["suite"] == "juniv"
        assert data["metadata"]["passed"]

    def test_csv_to_stdout(self, capsys):
        assert verify("--suite", "juniv", "--format", "csv") == EXIT_PASS
        assert capsys.readouterr().out.startswith("check_id,status,")

    def test_injected_defect_fails(self, capsys):
        path = os.path.join(FIXTURE_DIR, "fix_defect_j_tweak.json")
        code = main(["verify", "--fixture", path, "--suite", "juniv", "--bound", "1", *QUIET])
        assert code == EXIT_FAIL
        assert "2015.04.04.l5" in capsys.readouterr().out

    def test_unknown_suite(self):
        assert verify("--suite", "bogus") == EXIT_INVALID

    def test_missing_fixture(self, tmp_path):
        assert main(["verify", "--fixture", str(tmp_path / "absent.json"), *QUIET]) == EXIT_INVALID

    def test_invalid_fixture(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"name": "bad", "codes": []}))
        assert main(["verify", "--fixture", str(path), *QUIET]) == EXIT_INVALID

    def test_materialization_cap(self, tmp_path):
        path = tmp_path / "tight.json"
        path.write_text(json.dumps({
            "name": "tight",
            "codes": [{"name": c, "fiber": 1} for c in "abc"],
            "options": {"max_set_size": 2},
        }))
        assert main(["verify", "--fixture", str(path), "--suite", "category", *QUIET]) == EXIT_MATERIALIZATION


class TestConstruct:
    def construct(self, target, tmp_path):
        path = tmp_path / f"{target}.json"
        code = main(["construct", "--fixture", U3, "--target", target, "--bound", "1", "--lifting-bound", "2",
                     "--out", str(path), *QUIET])
        assert code == EXIT_PASS
        return json.loads(path.read_text())

    def test_cc(self, tmp_path):
        data = self.construct("cc", tmp_path)
        provenance = data["provenance"]
        assert provenance["format"] == "jcs-construct/1"
        assert provenance["anchor"] == "2015.04.02.eq2"
        assert "generated_at" not in provenance
        assert data["tables"]["object_counts"] == {"0": 1, "1": 3}

    def test_j_universe(self, tmp_path):
        tables = self.construct("j-universe", tmp_path)["tables"]
        assert tables["sizes"]["I_pE(Ũ)"] == 13
        assert tables["sizes"]["Fp"] == 13
        assert tables["jp_count"] == 1
        assert tables["filler_count"] == 1

    def test_derive_j(self, tmp_path):
        tables = self.construct("derive-j", tmp_path)["tables"]
        assert tables["theorem"] == "2015.05.22.th1"
        assert tables["equals_extensional_jp"] is True
        assert tables["J"] == self.construct("j-cc", tmp_path)["tables"]["J"]

    def test_h_of(self, tmp_path):
        tables = self.construct("h-of", tmp_path)["tables"]
        assert set(tables) == {"incl", "id"}
        assert tables["id"]["injective_on_objects"] is True
        assert tables["incl"]["source"] == "FIX-incl-small"

    def test_j_cc(self, tmp_path):
        tables = self.construct("j-cc", tmp_path)["tables"]
        assert tables["J"]
        assert len(tables["J"]) == len({tuple(row) for row in tables["J"]})

    def test_to_stdout(self, capsys):
        code = main(["construct", "--fixture", U3, "--target", "cc", "--bound", "1", *QUIET])
        assert code == EXIT_PASS
        assert json.loads(capsys.readouterr().out)["provenance"]["target"] == "cc"

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        out = str(blocker / "cc.json")
        assert main(["construct", "--fixture", U3, "--target", "cc", "--bound", "1", "--out", out, *QUIET]) == EXIT_FAIL
