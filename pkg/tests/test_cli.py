import json
import os
from fractions import Fraction

import pandas as pd
import pytest

import main
from superquant_toolkit.possys import service as possys_service
from superquant_toolkit.rootdata import service as rootdata_service
from superquant_toolkit.rootdata.service import AlgebraSpec
from superquant_toolkit.toolkit import EXIT_CONFIG_ERROR, EXIT_DOMAIN_ERROR, EXIT_OK, default_manager
from superquant_utils import cache, reports
from superquant_utils.utils import JobConfig

F = Fraction
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")

SU11 = {"algebra": {"family": "A", "m": 1, "n": 0}, "realform": "su(1,1|1)", "cell": [], "box": 4}
SU211 = {"algebra": {"family": "A", "m": 2, "n": 0}, "realform": "su(2,1|1)", "cell": [], "box": 4}


@pytest.fixture(autouse=True)
def fresh_cache():
    cache.clear_cache()
    yield
    cache.clear_cache()


def _run(tmp_path, command, config, *extra):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(dict(config, output={"dir": str(tmp_path / "out")}), indent=2), encoding="utf-8")
    return main.main([command, "--config", str(path), *extra])


def _table(tmp_path, name):
    return pd.read_csv(tmp_path / "out" / f"{name}.tsv", sep="\t", dtype=str, keep_default_na=False)


def _values(tmp_path, name):
    frame = _table(tmp_path, name)
    return dict(zip(frame["key"], frame["value"]))


def _golden(name):
    with open(os.path.join(GOLDEN_DIR, name), encoding="utf-8") as f:
        return f.read()


def _produced(tmp_path, name):
    return (tmp_path / "out" / f"{name}.tsv").read_text(encoding="utf-8")


def test_roots_matches_golden_file(tmp_path):
    assert _run(tmp_path, "roots", SU11) == EXIT_OK
    assert _produced(tmp_path, "roots") == _golden("roots_A10_su11.tsv")


def test_cli_output_equals_library_output(tmp_path):
    assert _run(tmp_path, "roots", SU211) == EXIT_OK
    rs = rootdata_service.build_root_system(AlgebraSpec("A", 2, 0))
    expected = reports.render_table(rootdata_service.run_roots(rs))
    assert (tmp_path / "out" / "roots.tsv").read_text(encoding="utf-8") == expected


def test_cells_report_matches_golden_file(tmp_path):
    assert _run(tmp_path, "cells", SU211) == EXIT_OK
    assert _produced(tmp_path, "cells") == _golden("cells_A20_su211.tsv")


def test_rho_reports_match_golden_files(tmp_path, su211_ctx):
    assert _run(tmp_path, "rho", SU211) == EXIT_OK
    lines = _produced(tmp_path, "rho").splitlines(keepends=True)
    # any point of the open cone may come back
    (witness_line,) = [line for line in lines if line.startswith("hc_witness\t")]
    assert "".join(line for line in lines if line != witness_line) == _golden("rho_A20_su211.tsv")
    witness = tuple(F(a) for a in witness_line.rstrip("\n").split("\t")[1].split(","))
    assert all(row.holds(witness) for row in possys_service.harish_chandra_rows(su211_ctx.ps))
    assert _produced(tmp_path, "simples") == _golden("simples_A20_su211.tsv")
    assert _produced(tmp_path, "admissibility") == _golden("admissibility_A20_su211.tsv")


def test_cone_membership(tmp_path):
    assert _run(tmp_path, "cone", dict(SU211, weight=[1, 1, 4, -6])) == EXIT_OK
    assert (tmp_path / "out" / "membership.tsv").exists()


def test_exactly_once_matches_golden_file(tmp_path):
    assert _run(tmp_path, "model", dict(SU211, box=6)) == EXIT_OK
    assert _produced(tmp_path, "exactly_once") == _golden("exactly_once_A20_su211.tsv")
    assert len(_table(tmp_path, "model")) == 10


def test_spectrum_and_classify(tmp_path):
    assert _run(tmp_path, "spectrum", SU11) == EXIT_OK
    frame = _table(tmp_path, "spectrum")
    assert set(frame["status"]) == {"member"}
    assert "-3,-1,0" in set(frame["lam"])
    assert _run(tmp_path, "classify", SU11) == EXIT_OK
    assert _values(tmp_path, "classify")["pseudo_kahler"] == "true"


def test_qr_on_the_sample_weight(tmp_path):
    assert _run(tmp_path, "qr", dict(SU211, box=6, lam_hat=[-4, -5, -1, 0])) == EXIT_OK
    values = _values(tmp_path, "qr")
    assert (values["reduced_quantization"], values["spectrum_multiplicity"], values["equal"]) == ("1", "1", "true")


def test_qr_rejects_non_integral_weight(tmp_path, caplog):
    assert _run(tmp_path, "qr", dict(SU11, lam_hat=["-5/2", "-1/2", 0])) == EXIT_CONFIG_ERROR
    assert "λ̂ not in the integral lattice" in caplog.text


def test_reduce_report(tmp_path):
    assert _run(tmp_path, "reduce", dict(SU11, lam_hat=[-3, -1, 0])) == EXIT_OK
    values = _values(tmp_path, "reduce")
    assert values["reduced_quantization"] == "-3,-2,1"
    assert values["in_C"] == "true"


def test_unitary_osp_block(tmp_path):
    config = {"algebra": {"family": "B", "m": 1, "n": 1}, "realform": "so(3)+sp(1,R)",
              "osp": {"mu": [0], "lam": -3, "a": []}}
    assert _run(tmp_path, "unitary", config) == EXIT_OK
    frame = _table(tmp_path, "unitary")
    binding = frame[frame["kind"] == "binding"].iloc[0]
    assert (binding["root"], binding["value"], binding["satisfied"]) == ("e1-d1", "-3", "true")


def test_atlas_writes_svg(tmp_path):
    assert _run(tmp_path, "atlas", SU11) == EXIT_OK
    svg = (tmp_path / "out" / "atlas.svg").read_text(encoding="utf-8")
    assert "<svg" in svg
    assert (tmp_path / "out" / "atlas.tsv").exists()


def test_atlas_needs_a_slice_above_rank_two(tmp_path):
    assert _run(tmp_path, "atlas", SU211) == EXIT_CONFIG_ERROR


def test_box_override(tmp_path):
    assert _run(tmp_path, "spectrum", SU11, "--box", "2") == EXIT_OK
    assert _table(tmp_path, "spectrum").empty


def test_missing_config_file(tmp_path):
    assert main.main(["roots", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG_ERROR


def test_malformed_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{\n  \"algebra\": \n}", encoding="utf-8")
    assert main.main(["roots", "--config", str(path)]) == EXIT_CONFIG_ERROR


@pytest.mark.parametrize("config", [
    dict(SU11, realform="su(3,0|1)"),
    dict(SU11, algebra={"family": "A", "m": 1, "n": 1}),
])
def test_domain_errors_exit_with_one(tmp_path, config):
    assert _run(tmp_path, "rho", config) == EXIT_DOMAIN_ERROR


def test_non_compact_cell_selector(tmp_path):
    assert _run(tmp_path, "spectrum", dict(SU211, cell=[2])) == EXIT_CONFIG_ERROR


def test_unknown_identifier_is_a_config_error():
    job = JobConfig(family="A", m=1, n=0, alpha=None, realform="su(1,1|1)")
    assert default_manager().run_command("nope", job) == EXIT_CONFIG_ERROR
