import json
import subprocess
import sys
from fractions import Fraction

import pytest

from necklaces import DerivationElem, ParseError, Tensor
from necklaces.cli import main, parse_element, parse_range, parse_wedge
from necklaces.complexes import wedge_basis


class TestParseElement:
    def test_necklace(self):
        got = parse_element("N(a1 b1)", 1)
        assert got == DerivationElem.necklace(1, (0, 1))

    def test_tensor_two_terms(self):
        got = parse_element("3/2 a1 b1 - a2 a2", 2)
        assert isinstance(got, Tensor)
        assert got.terms == {(0, 1): Fraction(3, 2), (2, 2): -1}

    def test_syntax_error_offset(self):
        with pytest.raises(ParseError) as err:
            parse_element("N(a1 b1", 1)
        assert err.value.position == 8

    def test_bare_coefficient_is_unit(self):
        got = parse_element("2", 1)
        assert got == Tensor.unit(1).scale(2)

    def test_signs_and_sums(self):
        got = parse_element("-N(a1) + 2 N(b1) - 1/3 N(a1 b1)", 1)
        assert got.terms == {(0,): -1, (1,): 2, (0, 1): Fraction(-1, 3)}

    def test_mixing_rejected(self):
        with pytest.raises(ParseError):
            parse_element("N(a1) + a1 b1", 1)

    def test_json_roundtrip(self):
        elem = parse_element("N(a1 b1) - 2 N(a2 a2 b2)", 2)
        assert DerivationElem.from_json_dict(elem.to_json_dict()) == elem

    def test_parse_wedge(self):
        v = parse_wedge("N(a1)^N(b1)", 1)
        assert v.basis is wedge_basis(1, 2, 2)
        assert not v.is_zero()
        v2 = parse_wedge("N(b1)^N(a1)", 1)
        assert v2 == v.scale(-1)

    def test_parse_range(self):
        assert parse_range("0..3") == (0, 3)
        assert parse_range("2") == (2, 2)


class TestCliCommands:
    def test_bracket(self, capsys):
        rc = main(["bracket", "--g", "1", "N(a1 a1)", "N(b1)"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["result"]["terms"] == [{"coeff": "2", "necklace": "a1"}]

    def test_cobracket(self, capsys):
        rc = main(["cobracket", "--g", "2", "N(a1 a2 b1 b2)"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert len(out["result"]["terms"]) == 4

    def test_mu(self, capsys):
        rc = main(["mu", "--g", "1", "a1 a1 b1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["result"]["terms"] == [
            {"coeff": "1", "necklace": "a1", "word": ""}
        ]

    def test_usage_error_exit_2(self, capsys):
        assert main(["cobracket", "--g", "1", "N(a1 b1"]) == 2
        assert main(["bracket", "--g", "1", "a1", "N(b1)"]) == 2

    def test_verify_exit_0(self, capsys):
        rc = main(
            ["verify", "--suite", "bialgebra", "--g", "1", "--w-max", "3",
             "--seed", "5", "--samples", "3"]
        )
        out = json.loads(capsys.readouterr().out)
        assert rc == 0 and out["ok"] and out["seed"] == 5

    def test_homology_report(self, tmp_path, capsys):
        out_file = tmp_path / "hom.json"
        rc = main(
            ["homology", "--g", "1", "--p", "0..2", "--w", "0..4",
             "--out", str(out_file)]
        )
        assert rc == 0
        rep = json.loads(out_file.read_text())
        assert rep["euler_ok"]
        assert {"cells", "induced", "euler_checks"} <= set(rep)

    def test_deform_check(self, capsys):
        rc = main(["deform", "--g", "1", "--A", "N(a1)^N(b1)", "--check-lemma31"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["homotopy_identity"] and out["invariance"]["ok"]

    def test_expand_and_compare(self, tmp_path, capsys):
        th1 = tmp_path / "t1.json"
        th2 = tmp_path / "t2.json"
        assert main(["expand", "--g", "1", "--degree", "4", "--out", str(th1)]) == 0
        assert main(["expand", "--g", "1", "--degree", "4", "--out", str(th2)]) == 0
        assert th1.read_bytes() == th2.read_bytes()
        rc = main(["compare", str(th1), str(th2)])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0 and out["u"]["terms"] == []

    def test_compare_inconsistent_exit_1(self, tmp_path, capsys):
        from necklaces.expansion import Expansion

        good = tmp_path / "good.json"
        bad = tmp_path / "bad.json"
        assert main(["expand", "--g", "1", "--degree", "4", "--out", str(good)]) == 0
        bad.write_text(json.dumps(Expansion.naive_exponential(1, 4).to_json_dict()))
        assert main(["compare", str(good), str(bad)]) == 1

    def test_loop(self, tmp_path, capsys):
        th = tmp_path / "t.json"
        assert main(["expand", "--g", "1", "--degree", "4", "--out", str(th)]) == 0
        rc = main(["loop", "--theta", str(th), "--word", "x1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["result"]["terms"][0] == {"coeff": "-1", "necklace": "a1"}

    def test_table_format(self, capsys):
        rc = main(["bracket", "--g", "1", "--format", "table", "N(a1 a1)", "N(b1)"])
        out = capsys.readouterr().out
        assert rc == 0 and "necklace: a1" in out


class TestDeterminism:
    def test_reports_byte_identical(self, tmp_path):
        for args in (
            ["verify", "--suite", "bialgebra", "--g", "1", "--w-max", "3",
             "--seed", "7", "--samples", "4"],
            ["homology", "--g", "1", "--p", "0..2", "--w", "0..4"],
            ["cobracket", "--g", "2", "N(a1 a2 b1 b2)"],
        ):
            a = tmp_path / "a.json"
            b = tmp_path / "b.json"
            assert main(args + ["--out", str(a)]) == 0
            assert main(args + ["--out", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes()

    def test_subprocess_determinism(self, tmp_path):
        # fresh interpreters (different hash seeds) must agree byte for byte
        outs = []
        for name in ("x.json", "y.json"):
            path = tmp_path / name
            proc = subprocess.run(
                [sys.executable, "-m", "necklaces.cli", "expand", "--g", "1",
                 "--degree", "4", "--out", str(path)],
                capture_output=True,
            )
            assert proc.returncode == 0, proc.stderr
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
