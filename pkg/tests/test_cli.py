import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EXAMPLE_F
from reeslab import Ring
from reeslab.cli import SCHEMA, CorpusSpec, corpus_run, default_corpus, main, run_command


def run(*argv):
    err = io.StringIO()
    code, out = run_command(list(argv), err=err)
    return code, out, err.getvalue()


class TestSubcommands:
    def test_downgrade_example(self):
        code, out, _ = run("downgrade", "--n", "3", "--f", EXAMPLE_F)
        assert code == 0
        assert out.splitlines() == [
            "f0 = x1^2*x2 + x1*x3^2",
            "f1 = x1*x2*T1 + x3^2*T1",
            "f2 = x2*T1^2 + x3*T1*T3",
            "f3 = T1^2*T2 + T1*T3^2",
        ]

    def test_downgrade_max_json_round_trips(self):
        code, out, _ = run("downgrade", "--n", "3", "--f", EXAMPLE_F, "--strategy", "max", "--json")
        data = json.loads(out)
        assert code == 0 and data["schema"] == SCHEMA
        ring = Ring(3)
        assert ring.parse(data["sequence"][1]) == ring.parse("x1^2*T2 + x1*x3*T3")
        assert [str(ring.parse(s)) for s in data["sequence"]] == data["sequence"]

    def test_verify_json(self):
        code, out, _ = run("verify", "--n", "3", "--f", EXAMPLE_F, "--json")
        data = json.loads(out)
        assert code == 0
        assert data["verdict"] is True
        assert data["saturation_index"] == 3

    def test_rees_ideal_methods(self):
        ring = Ring(3)
        code, out, _ = run("rees-ideal", "--n", "3", "--f", EXAMPLE_F, "--json")
        assert code == 0
        down = [ring.parse(g) for g in json.loads(out)["generators"]]
        assert len(down) == 7
        code, out, _ = run("rees-ideal", "--n", "3", "--f", EXAMPLE_F, "--method", "saturation", "--json")
        data = json.loads(out)
        assert code == 0 and data["saturation_index"] == 3
        from reeslab import Ideal, ideal_equal
        sat = [ring.parse(g) for g in data["generators"]]
        assert ideal_equal(Ideal(ring, tuple(down)), Ideal(ring, tuple(sat)))

    def test_classify_json_schema(self):
        code, out, _ = run("classify", "--n", "3", "--f", EXAMPLE_F, "--json", "--no-timings")
        data = json.loads(out)
        assert code == 0
        case = data["cases"][0]
        for key in ("n", "d", "f", "verdict", "relation_type", "fiber_generator", "min_gens",
                    "dim", "depth", "cm", "almost_cm", "fiber_reg_T", "saturation_index"):
            assert key in case
        assert case["fiber_generator"] == "T1^2*T2 + T1*T3^2"
        assert (data["passed"], data["failed"]) == (1, 0)

    def test_classify_text(self):
        code, out, _ = run("classify", "--n", "2", "--f", "x2^2", "--no-timings")
        assert code == 0
        assert "relation_type: 2" in out

    def test_rationals(self):
        code, out, _ = run("verify", "--n", "3", "--f", "1/2*x1^2 - x2*x3", "--field", "QQ", "--json")
        assert code == 0 and json.loads(out)["verdict"] is True


class TestExitCodes:
    def test_n_too_small(self):
        code, out, err = run("classify", "--n", "1", "--f", "x1")
        assert code == 1 and out == ""
        assert err.startswith("precondition failed:")

    def test_unknown_flag(self):
        code, _, err = run("verify", "--n", "2", "--f", "x1", "--bogus")
        assert code == 1 and err.startswith("usage error:")

    def test_unknown_command(self):
        code, _, err = run("frobnicate")
        assert code == 1 and err.startswith("usage error:")

    def test_malformed_polynomial(self):
        code, _, err = run("downgrade", "--n", "2", "--f", "x1^^2")
        assert code == 1 and err.startswith("parse error:")
        assert "position" in err

    def test_budget_exceeded(self):
        code, _, err = run("classify", "--n", "3", "--f", EXAMPLE_F, "--budget", "3")
        assert code == 2 and err.startswith("budget exceeded:")

    def test_bad_field(self):
        code, _, err = run("verify", "--n", "2", "--f", "x1", "--field", "12")
        assert code == 1 and err.startswith("invalid input:")

    def test_diagnostics_are_distinct(self):
        lines = {
            run("verify", "--n", "2", "--f", "x1", "--bogus")[2].split(":")[0],
            run("downgrade", "--n", "2", "--f", "x1^^2")[2].split(":")[0],
            run("classify", "--n", "3", "--f", EXAMPLE_F, "--budget", "3")[2].split(":")[0],
        }
        assert len(lines) == 3

    @settings(max_examples=150, deadline=None)
    @given(st.text(alphabet="xT0123456789^*+-/ ()a.", min_size=1, max_size=12))
    def test_garbage_never_crashes(self, text):
        code, _, err = run("downgrade", "--n", "2", "--f", text)
        assert code in (0, 1)
        if code == 1:
            assert err.split(":")[0] in ("parse error", "precondition failed", "invalid input", "usage error")


class TestCorpus:
    def test_empty_corpus(self, tmp_path):
        spec = tmp_path / "empty.json"
        spec.write_text(json.dumps({"cases": []}))
        code, out, _ = run("corpus", str(spec), "--no-timings")
        data = json.loads(out)
        assert code == 0
        assert data["cases"] == [] and data["passed"] == 0 and data["failed"] == 0

    def test_pure_power_fibers(self, tmp_path):
        spec = tmp_path / "powers.json"
        spec.write_text(json.dumps({"cases": [
            {"n": 2, "f": "x2^3"}, {"n": 3, "f": "x3^2"}, {"n": 4, "f": "x4^2"},
        ]}))
        code, out, err = run("corpus", str(spec), "--no-timings")
        data = json.loads(out)
        assert code == 0
        assert [c["fiber_generator"] for c in data["cases"]] == ["T2^3", "T3^2", "T4^2"]
        assert "passed 3, failed 0" in err

    def test_spec_parse_error(self, tmp_path):
        spec = tmp_path / "bad.json"
        spec.write_text("{not json")
        code, _, err = run("corpus", str(spec))
        assert code == 1 and err.startswith("usage error:")
        spec.write_text(json.dumps({"cases": [{"n": 1, "d": 2}]}))
        assert run("corpus", str(spec))[0] == 1

    def test_missing_spec_file(self, tmp_path):
        assert run("corpus", str(tmp_path / "nope.json"))[0] == 1

    def test_random_cases_deterministic(self, tmp_path):
        spec = tmp_path / "rand.json"
        spec.write_text(json.dumps({"cases": [{"n": 2, "d": 3, "count": 3, "seed": 5}]}))
        a = run("corpus", str(spec), "--no-timings")[1]
        b = run("corpus", str(spec), "--no-timings")[1]
        assert a == b
        c = run("corpus", str(spec), "--no-timings", "--seed", "6")[1]
        assert c != a
        assert c == run("corpus", str(spec), "--no-timings", "--seed", "6")[1]

    def test_jobs_preserve_order(self, tmp_path):
        spec = tmp_path / "mixed.json"
        spec.write_text(json.dumps({"cases": [
            {"n": 3, "d": 3, "count": 2, "seed": 1}, {"n": 2, "f": "x1"}, {"n": 3, "f": EXAMPLE_F},
        ]}))
        serial = run("corpus", str(spec), "--no-timings")[1]
        parallel = run("corpus", str(spec), "--no-timings", "--jobs", "2")[1]
        assert serial == parallel

    def test_envelope_counts(self):
        spec = CorpusSpec.from_json({"cases": [{"n": 2, "d": 1, "count": 2}, {"n": 2, "f": "x2^2"}]})
        env = corpus_run(spec, timings=False)
        assert env["passed"] + env["failed"] == len(env["cases"]) == 3

    def test_default_corpus_shape(self):
        spec = default_corpus()
        total = sum(len(c.instances()) for c in spec.cases)
        assert total == 2 * 4 * 5 + 3
        assert any(c.f == EXAMPLE_F for c in spec.cases)


def test_byte_identical_classify_json():
    argv = ["classify", "--n", "3", "--f", EXAMPLE_F, "--json", "--no-timings", "--seed", "4"]
    assert run(*argv)[1] == run(*argv)[1]


def test_main_writes_stdout(capsys):
    assert main(["downgrade", "--n", "2", "--f", "x2^2"]) == 0
    assert capsys.readouterr().out.startswith("f0 = x2^2")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "reeslab", "verify", "--n", "2", "--f", "x1^2 + x2^2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("verdict: true")
