import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from jmesrisk._rng import make_rng
from jmesrisk.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main, parse_model
from jmesrisk.copulas import GaussianCopula, GumbelCopula
from jmesrisk.distributions import Gamma
from jmesrisk.errors import DomainError
from jmesrisk.pipeline import synthetic_prices, write_loss_csv, write_price_csv


@pytest.fixture
def pair_files(tmp_path):
    dates, px, py = synthetic_prices(GaussianCopula(0.6), 800, seed=1)
    write_price_csv(tmp_path / "x.csv", dates, px)
    write_price_csv(tmp_path / "y.csv", dates, py)
    return tmp_path


def _config(folder, extra=""):
    f = folder / "run.toml"
    f.write_text('alphas = [0.95]\nbetas = [0.95]\ncopula_candidates = ["gaussian", "independence"]\n'
                 f'output_dir = "out"\n{extra}[[pairs]]\nname = "p"\nx = "x.csv"\ny = "y.csv"\n')
    return f


def test_parse_model():
    assert parse_model("gamma:3,1.5") == Gamma(3.0, 1.5)
    assert parse_model("gumbel:2") == GumbelCopula(2.0)
    assert parse_model("t_copula:0.5,4").family == "student_t"
    for bad in ("gamma:x", "nosuch:1", "gamma:1,2,3,4"):
        with pytest.raises(DomainError):
            parse_model(bad)


def test_report(pair_files, capsys):
    cfg = _config(pair_files)
    assert main(["report", "--config", str(cfg)]) == EXIT_OK
    out = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["pair"] == "p"
    assert float(rows[0]["JMES"]) > float(rows[0]["ES"])
    assert (pair_files / "out" / "report.json").exists()


def test_report_level_override(pair_files, capsys, tmp_path):
    cfg = _config(pair_files)
    code = main(["report", "--config", str(cfg), "--alpha", "0.9", "--alpha", "0.95", "--beta", "0.9",
                 "--out", str(tmp_path / "o2")])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [(r["alpha"], r["beta"]) for r in rows] == [("0.9", "0.9"), ("0.95", "0.9")]
    assert (tmp_path / "o2" / "report.csv").exists()


def test_report_all_pairs_fail(tmp_path, capsys):
    # a constant series has no tail excesses; no pair survives, so the run fails
    write_loss_csv(tmp_path / "x.csv", np.ones(600))
    write_loss_csv(tmp_path / "y.csv", make_rng(2).standard_normal(600))
    cfg = _config(tmp_path)
    assert main(["report", "--config", str(cfg)]) == EXIT_NUMERIC
    assert "pair p: DomainError: need at least 10 excesses" in capsys.readouterr().err


def test_report_input_errors(tmp_path, capsys):
    f = tmp_path / "empty.toml"
    f.write_text("alphas = [0.9]\n")
    assert main(["report", "--config", str(f)]) == EXIT_INPUT
    f.write_text("nonsense = 1\n")
    assert main(["report", "--config", str(f)]) == EXIT_INPUT
    assert main(["report", "--config", str(tmp_path / "missing.toml")]) == EXIT_INPUT


def test_figures(tmp_path, capsys):
    assert main(["figures", "fig4a", "--out", str(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == str(tmp_path / "fig4a.csv")
    assert main(["figures", "nope", "--out", str(tmp_path)]) == EXIT_INPUT
    assert "unknown figure" in capsys.readouterr().err


def test_fit_marginal(pair_files, capsys):
    assert main(["fit-marginal", str(pair_files / "x.csv"), "--tail-frac", "0.1"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["n"] == 800 and out["tail_frac"] == 0.1
    assert out["upper"]["n_exceed"] == 80
    assert main(["fit-marginal", str(pair_files / "missing.csv")]) == EXIT_INPUT


def test_fit_copula_from_series(pair_files, capsys):
    args = ["fit-copula", str(pair_files / "x.csv"), str(pair_files / "y.csv"),
            "--candidates", "gaussian,gumbel,independence"]
    assert main(args) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["family"] == "gaussian"
    assert float(rows[0]["params"]) == pytest.approx(0.6, abs=0.08)
    aics = [float(r["aic"]) for r in rows]
    assert aics == sorted(aics)


def test_fit_copula_from_pseudo(tmp_path, capsys):
    u, v = GumbelCopula(2.0).sample(1000, make_rng(3))
    f = tmp_path / "uv.csv"
    f.write_text("u,v\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(u, v)))
    assert main(["fit-copula", str(f), "--candidates", "gumbel,gaussian"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["family"] == "gumbel"
    assert main(["fit-copula", str(f), str(f), str(f)]) == EXIT_INPUT


def test_check_order(capsys):
    assert main(["check-order", "st", "gamma:3,1.5", "gamma:2,2.5"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "violated" and out[1].startswith("witness: ")
    assert main(["check-order", "icx", "gamma:3,1.5", "gamma:2,2.5"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "holds"
    assert main(["check-order", "tp2", "fgm:-0.5", "--json"]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert d["relation"] == "TP2_tail" and d["verdict"] == "violated"
    assert main(["check-order", "l_alpha", "gumbel:3", "gumbel:2", "--alpha", "0.7", "--beta", "0.82"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "holds"


@pytest.mark.parametrize("argv", [
    ["check-order", "st", "gamma:3,1.5"],
    ["check-order", "si", "gumbel:2", "gumbel:3"],
    ["check-order", "l_alpha", "gumbel:3", "gumbel:2"],
    ["check-order", "star", "gamma:1,1", "gamma:2,1"],
    ["check-order", "st", "weird:1", "gamma:2,1"],
])
def test_check_order_input_errors(argv, capsys):
    assert main(argv) == EXIT_INPUT


def test_mc_validate(capsys):
    assert main(["mc-validate", "--n", "40000", "--alpha", "0.9", "--beta", "0.9", "--seed", "7"]) == EXIT_OK
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert len({(r["copula"], r["margin"]) for r in rows}) == 9
    assert all(r["ok"] == "pass" for r in rows)
    assert "all pass" in captured.err


def test_mc_validate_reports_disagreement(capsys):
    code = main(["mc-validate", "--n", "40000", "--alpha", "0.9", "--beta", "0.9", "--k", "0.001"])
    assert code == EXIT_FAIL
    assert "FAILED" in capsys.readouterr().err


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "jmesrisk.cli", "check-order", "disp", "gamma:1.5,2.5",
                           "gamma:2,3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "holds"
    proc = subprocess.run([sys.executable, "-m", "jmesrisk.cli"], capture_output=True, text=True)
    assert proc.returncode == 2
