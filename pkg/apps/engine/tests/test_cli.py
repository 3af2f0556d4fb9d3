"""
Tests for the hmf-theta command-line interface
"""

import json

import pytest

from main import build_parser, main


class TestCLI:
    """Commands run in-process through main()"""

    def run(self, capsys, *argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    def test_field(self, capsys):
        code, out, _ = self.run(capsys, "field", "--d", "2")
        assert code == 0
        assert "discriminant D = 8" in out
        assert "prime above 2 q = 2+√2" in out

    def test_field_json(self, capsys):
        code, out, _ = self.run(capsys, "field", "--json")
        assert code == 0
        assert json.loads(out)["different"] == ["4", "2"]

    def test_field_outside_catalog(self, capsys):
        code, _, err = self.run(capsys, "field", "--d", "3")
        assert code == 2
        assert "error:" in err

    def test_unit_group(self, capsys):
        code, out, _ = self.run(capsys, "unit-group", "--level", "q^5", "--json")
        assert code == 0
        data = json.loads(out)
        assert data["order"] == 16
        assert data["generated_by_units"] is False

    def test_characters(self, capsys):
        code, out, _ = self.run(capsys, "characters", "--level", "q^6", "--order", "2", "--json")
        assert code == 0
        assert sorted(c["order"] for c in json.loads(out)) == [1, 2]

    def test_basis(self, capsys):
        code, out, _ = self.run(capsys, "basis", "--level", "q^14", "--char", "phi", "--json")
        assert code == 0
        data = json.loads(out)
        assert data["dimension"] == 6
        assert data["certificate"] == "pivot"

    def test_basis_writes_expansions(self, capsys, tmp_path):
        code, _, _ = self.run(capsys, "basis", "--level", "q^5", "--out-dir", str(tmp_path))
        assert code == 0
        assert (tmp_path / "theta_0.json").exists()

    def test_basis_split_level(self, capsys):
        """7 splits in Q(√2)"""
        code, out, _ = self.run(capsys, "basis", "--level", "7", "--json")
        assert code == 3
        assert json.loads(out)["error"] == "HypothesisError"

    def test_basis_level_not_divisible_by_four(self, capsys):
        code, _, _ = self.run(capsys, "basis", "--level", "q^3")
        assert code == 3

    def test_bad_spec(self, capsys):
        code, _, err = self.run(capsys, "basis", "--level", "q^5", "--char", "nonsense")
        assert code == 2
        assert "error:" in err

    def test_theta_then_hecke(self, capsys, tmp_path):
        path = tmp_path / "theta.json"
        code, out, _ = self.run(capsys, "theta", "--box", "30", "--out", str(path))
        assert code == 0
        assert "a(1) = 2" in out
        code, out, _ = self.run(capsys, "hecke", "--on", str(path), "--op", "T", "--p", "3", "--json")
        assert code == 0
        ratio = json.loads(out)["ratio"]
        assert ratio == {"order": 1, "coeffs": ["10/9"]}

    def test_box_is_a_global_flag(self, capsys, tmp_path):
        path = tmp_path / "theta.json"
        self.run(capsys, "theta", "--out", str(path))
        code, out, _ = self.run(capsys, "hecke", "--on", str(path), "--op", "T", "--p", "3", "--box", "3", "--json")
        assert code == 0
        data = json.loads(out)
        assert data["expansion"]["box"] == ["3", "3"]
        assert data["ratio"] == {"order": 1, "coeffs": ["10/9"]}
        code, _, _ = self.run(capsys, "field", "--box", "5")
        assert code == 0

    def test_hecke_needs_argument(self, capsys, tmp_path):
        path = tmp_path / "theta.json"
        self.run(capsys, "theta", "--box", "10", "--out", str(path))
        code, _, _ = self.run(capsys, "hecke", "--on", str(path), "--op", "U")
        assert code == 2

    def test_missing_expansion_file(self, capsys, tmp_path):
        code, _, _ = self.run(capsys, "lseries", "--form", str(tmp_path / "absent.json"))
        assert code == 2

    def test_verify_dimensions(self, capsys):
        code, out, _ = self.run(capsys, "verify", "--suite", "dimensions", "--n-max", "8")
        assert code == 0
        assert out.startswith("dimensions: PASS")

    def test_verify_failure_exit_code(self, capsys):
        code, out, _ = self.run(capsys, "verify", "--suite", "hecke-eigen", "--primes", "2+w", "--n-max", "5")
        assert code == 1
        assert "FAIL" in out

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["nope"])
