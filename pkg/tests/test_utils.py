import dataclasses
import json
from fractions import Fraction

import numpy as np
import pytest

from superquant_toolkit.toolkit import newton_params
from superquant_utils import reports
from superquant_utils import utils as common_utils
from superquant_utils.errors import ConfigError

F = Fraction

CONFIG_TEXT = """{
  "algebra": {
    "family": "A",
    "m": 2,
    "n": 0
  },
  "realform": "su(2,1|1)",
  "cell": [1, 1],
  "box": 5,
  "lam_hat": [-4, "-5", "1/2", 0],
  "potential": {"kind": "terms", "terms": [{"coefficient": 2, "weight": [-1, -1, 0, 0]}]},
  "solver": {"tol": 1e-9}
}"""


def _parse(text, overrides=None):
    return common_utils.parse_job_config(json.loads(text), text, overrides)


def test_parse_job_config():
    job = _parse(CONFIG_TEXT)
    assert (job.family, job.m, job.n, job.realform) == ("A", 2, 0, "su(2,1|1)")
    assert job.cell == (1,)
    assert job.box == 5
    assert job.lam_hat == (F(-4), F(-5), F(1, 2), F(0))
    assert job.potential.kind == "terms"
    assert job.potential.terms == ((2.0, (F(-1), F(-1), F(0), F(0))),)
    assert job.solver.tol == 1e-9
    assert job.solver.max_iter == 200
    assert job.out_dir == common_utils.DEFAULT_OUT_DIR
    assert job.line_of("lam_hat") == 10
    assert job.line_of("realform") == 7


def test_overrides_win_over_the_file():
    job = _parse(CONFIG_TEXT, {"box": 2, "tol": 1e-6, "out": "elsewhere", "slice": None})
    assert job.box == 2
    assert job.solver.tol == 1e-6
    assert job.out_dir == "elsewhere"
    assert job.slice is None


def test_every_solver_setting_reaches_newton():
    job = _parse(CONFIG_TEXT)
    params = newton_params(job)
    for f in dataclasses.fields(common_utils.SolverConfig):
        assert getattr(params, f.name) == getattr(job.solver, f.name)


@pytest.mark.parametrize("old,new,line", [
    ('"box": 5', '"box": "five"', 9),
    ('"box": 5', '"box": -1', 9),
    ('"cell": [1, 1]', '"cell": [0]', 8),
    ('"1/2"', '"half"', 10),
    ('"realform": "su(2,1|1)"', '"realform": ""', 7),
])


def test_config_errors_point_at_the_line(old, new, line):
    with pytest.raises(ConfigError) as excinfo:
        _parse(CONFIG_TEXT.replace(old, new))
    assert excinfo.value.line == line
    assert f"(line {line})" in str(excinfo.value)


def test_missing_algebra_section():
    with pytest.raises(ConfigError):
        common_utils.parse_job_config({"realform": "su(1,1|1)"})


def test_load_config_reports_json_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "box": 4,\n  "realform" "x"\n}', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        common_utils.load_config(str(path))
    assert excinfo.value.line == 3


def test_load_config_rejects_non_objects(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        common_utils.load_config(str(path))


def test_find_key_line():
    assert common_utils.find_key_line(CONFIG_TEXT, "family") == 3
    assert common_utils.find_key_line(CONFIG_TEXT, "absent") is None


@pytest.mark.parametrize("value,text", [
    (None, ""),
    (True, "true"),
    (F(-3, 2), "-3/2"),
    (7, "7"),
    (0.1 + 0.2, "0.3"),
    (1 / 3, "0.333333333333"),
    ((F(1), F(-1, 2), 0), "1,-1/2,0"),
    (np.array([0.5, 2.0]), "0.5,2"),
    ("R={}", "R={}"),
])


def test_format_value(value, text):
    assert reports.format_value(value) == text


def test_render_table_is_tab_separated():
    rows = [{"a": 1, "b": F(1, 2)}, {"a": 2, "b": True}]
    assert reports.render_table(rows) == "a\tb\n1\t1/2\n2\ttrue\n"
    assert reports.render_table([], ["a", "b"]) == "a\tb\n"


def test_write_table_creates_the_directory(tmp_path):
    path = reports.write_table(reports.key_value_rows([("x", 1.5)]), str(tmp_path / "deep" / "kv.tsv"))
    with open(path, encoding="utf-8") as f:
        assert f.read() == "key\tvalue\nx\t1.5\n"
