import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from kissing.formats import (
    cap_lemma_dict,
    parse_expansion,
    parse_lp_problem,
    prop1_dict,
    read_certificate,
    read_expansion,
    render_report,
    write_expansion,
    write_lp_dump,
    write_plot_csv,
    write_plot_svg,
)
from kissing.gegenbauer import GegenbauerExpansion
from kissing.lpbound import build_classical_lp, solve_lp
from kissing.ratcore import RationalInterval
from kissing.spheregeom import CapLemmaReport, Prop1Report
from kissing.types import FormatError, Verdict

EXAMPLE = str(Path(__file__).parent.parent / "example_data" / "kissing_f.expansion")


class TestExpansionFiles:
    def test_write_layout(self):
        buf = io.StringIO()
        write_expansion(GegenbauerExpansion(3, {2: Fraction(-1, 3), 0: Fraction(1, 2)}), buf)
        assert buf.getvalue() == "format 1.0\ndim 3\n0 1/2\n2 -1/3\n"

    def test_written_file_reads_back(self, f_kissing, tmp_path):
        path = tmp_path / "f.expansion"
        with open(path, "w") as fd:
            write_expansion(f_kissing, fd)
        assert read_expansion(str(path)) == f_kissing

    def test_bundled_example_is_the_kissing_function(self, f_kissing):
        assert read_expansion(EXAMPLE) == f_kissing

    def test_comments_and_decimals(self):
        text = "# header\ndim 3   # sphere in R^3\n\n0 0.25\n4 1/8\n"
        e = parse_expansion(text)
        assert e.coeffs == {0: Fraction(1, 4), 4: Fraction(1, 8)}

    @pytest.mark.parametrize(
        "text",
        [
            "0 1/2\n",
            "dim three\n0 1/2\n",
            "dim 3\n0 1/2\n0 1/3\n",
            "dim 3\nk 1/2\n",
            "dim 3\n0 1/2 extra\n",
            "dim 3\n0 half\n",
            "format 9.0\ndim 3\n",
            "format\ndim 3\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(FormatError):
            parse_expansion(text)

    def test_error_names_the_line(self):
        with pytest.raises(FormatError, match="f.txt:3"):
            parse_expansion("dim 3\n0 1\n0 2\n", "f.txt")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            read_expansion(str(tmp_path / "missing.expansion"))


class TestCertificateFiles:
    def test_read_checks_version(self, tmp_path):
        path = tmp_path / "cert.json"
        path.write_text(json.dumps({"format_version": "2.0"}))
        with pytest.raises(FormatError):
            read_certificate(str(path))

    def test_read_accepts_current_version(self, tmp_path):
        path = tmp_path / "cert.json"
        path.write_text(json.dumps({"format_version": "1.0", "verdict": "Pass"}))
        assert read_certificate(str(path))["verdict"] == "Pass"

    @pytest.mark.parametrize("content", ["not json", "[]", "{}"])
    def test_read_rejects_bad_content(self, tmp_path, content):
        path = tmp_path / "cert.json"
        path.write_text(content)
        with pytest.raises(FormatError):
            read_certificate(str(path))


class TestPlotData:
    def test_csv(self):
        buf = io.StringIO()
        write_plot_csv([(Fraction(-1), Fraction(1, 3)), (Fraction(1, 2), Fraction(0))], buf)
        assert buf.getvalue() == "t,f\n-1,0.333333333333\n0.5,0\n"

    def test_svg_is_reproducible(self, tmp_path):
        points = [(Fraction(j, 10), Fraction(j * j, 100)) for j in range(-10, 6)]
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        write_plot_svg(points, str(a))
        write_plot_svg(points, str(b))
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().lstrip().startswith("<?xml")


class TestLPDump:
    def test_dump_lists_problem_and_solution(self):
        p = build_classical_lp(3, Fraction(-1, 2), 1, 2)
        sol = solve_lp(p)
        buf = io.StringIO()
        write_lp_dump(p, sol, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "format 1.0"
        assert lines[1] == "maximize -1/1"
        assert lines[2] == "var c1 >= 0/1"
        assert lines[3] == "row grid:-1/1 <= -1/1 : -1/1"
        assert lines[4] == "row grid:-1/2 <= -1/1 : -1/2"
        assert "status Optimal" in lines
        assert "x c1 2/1" in lines
        assert "objective -2/1" in lines

    def test_problem_reads_back(self):
        p = build_classical_lp(3, Fraction(1, 2), 3, 5)
        buf = io.StringIO()
        write_lp_dump(p, None, buf)
        q = parse_lp_problem(buf.getvalue())
        assert q.objective == p.objective
        assert q.var_names == p.var_names
        assert q.constraints == p.constraints

    def test_missing_objective(self):
        with pytest.raises(FormatError):
            parse_lp_problem("format 1.0\nvar x0 >= 0/1\n")

    def test_bad_row(self):
        with pytest.raises(FormatError):
            parse_lp_problem("maximize 1/1\nvar x0 >= 0/1\nrow r ~ 1 : 1/1\n")


class TestReports:
    def test_cap_lemma_fields(self):
        r = CapLemmaReport(
            Verdict.PASS, RationalInterval(Fraction(1, 2), Fraction(1, 2)), 1, True, 40, 10, 7, 0, 0.6
        )
        d = cap_lemma_dict(r)
        assert d["check"] == "cap-lemma"
        assert d["verdict"] == "Pass"
        assert d["infimum"] == ["1/2", "1/2"]

    def test_prop1_keys_are_strings(self):
        d = prop1_dict(Prop1Report(3, 7, Fraction(2), [], {3: 2, 4: 1}))
        assert d["dims"] == {"3": 2, "4": 1}
        assert d["minimum"] == "2/1"
        assert d["ok"] is True

    def test_render_report_ends_with_newline(self):
        assert render_report({"a": 1}) == '{\n  "a": 1\n}\n'
