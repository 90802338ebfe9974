"""Command line surface: subcommands, config merging, record output, exit
codes.  Most tests call main() in process; one exercises the installed
console script end to end.
"""

import subprocess
import sys

import pytest

from limitlearn.cli import ExperimentConfig, main, parse_config_file
from limitlearn.errors import ConfigError

E0_CODE_TEXT = "(ef (or (le (ix 0 1 1) (ix 1 0 0)) (eq (ix 0 1 0) (ix 0 1 0))))\n"
ID_CODE_TEXT = "(ef (eq (ix 0 1 0) (ix 0 1 0)))\n"

CATALOG_LINES = [
    "relation=id learnable=YES summary=equality of sequences",
    "relation=e0 learnable=YES summary=eventual equality of tails",
    "relation=oscillation learnable=YES summary=mutually bounded one-counts over zero blocks",
    "relation=sim0 learnable=NO summary=both infinite support, or equal",
    "relation=sim1 learnable=NO summary=same side of the infinite-support divide",
    "relation=sim3 learnable=NO summary=equal, or both infinite and equal past position 0",
    "relation=sim4 learnable=NO summary=as sim3, or both finite starting with 1",
    "relation=sim5 learnable=NO summary=as sim3, or both finite agreeing at 0",
    "relation=tree learnable=N/A summary=equal, or even parts on tree branches with infinite odd parts",
]

SIMULATE_LINES = [
    "stage=0 hypothesis=0 pointer=0 bitsReadCount=0",
    "stage=1 hypothesis=0 pointer=0 bitsReadCount=2",
    "stage=2 hypothesis=0 pointer=2 bitsReadCount=4",
    "stage=3 hypothesis=2 pointer=3 bitsReadCount=2",
    "stage=4 hypothesis=1 pointer=4 bitsReadCount=0",
    "stage=5 hypothesis=1 pointer=4 bitsReadCount=8",
    "stage=6 hypothesis=1 pointer=4 bitsReadCount=2",
    "stage=7 hypothesis=1 pointer=4 bitsReadCount=2",
    "stage=8 hypothesis=1 pointer=4 bitsReadCount=2",
    "summary mindChanges=2 lastChangeStage=4 exCorrectAtHorizon=true "
    "bcCorrectSuffixStart=4 certified=1",
]


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "e0.s2f").write_text(E0_CODE_TEXT)
    (tmp_path / "idcode.s2f").write_text(ID_CODE_TEXT)
    (tmp_path / "run.cfg").write_text(
        "# reference experiment\n"
        "relation = e0\n"
        "target = 1|0\n"
        "informant = |1 |0\n"
        "learner = synth:e0.s2f\n"
        "horizon = 3\n"
    )
    return tmp_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --------------------------------------------------------------- subcommands

def test_catalog_output(capsys):
    code, out, err = run_cli(capsys, "catalog")
    assert code == 0 and err == ""
    assert out.splitlines() == CATALOG_LINES


def test_simulate_reference_output(capsys, workdir):
    code, out, _ = run_cli(
        capsys, "simulate",
        "--relation", "e0", "--target", "1|0", "--informant", "|1", "|0",
        "--learner", "synth:e0.s2f", "--horizon", "8",
        "--config", str(workdir / "run.cfg"),
    )
    assert code == 0
    assert out.splitlines() == SIMULATE_LINES


def test_simulate_from_config_alone(capsys, workdir):
    code, out, _ = run_cli(capsys, "simulate", "--config", str(workdir / "run.cfg"))
    assert code == 0
    # horizon 3 from the file: four stage records and the summary
    assert out.splitlines()[:4] == SIMULATE_LINES[:4]
    assert len(out.splitlines()) == 5


def test_simulate_generator_informant_skips_certification(capsys, workdir):
    code, out, _ = run_cli(
        capsys, "simulate",
        "--relation", "e0", "--target", "1|0", "--informant", "finite-support",
        "--learner", "synth:e0.s2f", "--horizon", "4",
        "--config", str(workdir / "run.cfg"),
    )
    assert code == 0
    assert out.splitlines()[-1].endswith("certified=-")


def test_adversary_output(capsys):
    code, out, _ = run_cli(
        capsys, "adversary", "--relation", "sim1",
        "--learner", "constant:0", "--patience", "4", "--rounds", "2",
    )
    assert code == 0
    assert out == "verdict=LEARNER_STUCK stages= target=|0 witness=|0\n"


def test_falsify_all_candidates(capsys):
    code, out, _ = run_cli(capsys, "falsify", "--relation", "sim0", "--max-size", "3")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 5
    assert all("counterexample x=" in line for line in lines)
    assert lines[2].startswith("code=identity counterexample")


def test_falsify_single_code(capsys, workdir):
    code, out, _ = run_cli(
        capsys, "falsify", "--relation", "sim1", "--max-size", "3",
        "--code", "e0.s2f", "--config", str(workdir / "run.cfg"),
    )
    assert code == 0
    assert out == "code=e0 counterexample x=|1 y=|01\n"


def test_falsify_honest_code_reports_none(capsys, workdir):
    code, out, _ = run_cli(
        capsys, "falsify", "--relation", "e0", "--max-size", "3",
        "--code", "e0.s2f", "--config", str(workdir / "run.cfg"),
    )
    assert code == 0
    assert out == "code=e0 counterexample=NONE\n"


def test_falsify_against_a_tree_file(capsys, tmp_path):
    (tmp_path / "t.tree").write_text("node 0\nnode 0.1\n")
    (tmp_path / "idcode.s2f").write_text(ID_CODE_TEXT)
    (tmp_path / "c.cfg").write_text("relation = tree:t.tree\n")
    code, out, _ = run_cli(
        capsys, "falsify", "--config", str(tmp_path / "c.cfg"),
        "--code", "idcode.s2f", "--max-size", "2",
    )
    assert code == 0
    assert out == "code=idcode counterexample=NONE\n"


def test_crosscheck_agreements(capsys, workdir):
    for args in (
        ("--relation", "e0", "--samples", "60", "--seed", "0"),
        ("--relation", "id", "--samples", "60", "--seed", "1"),
        ("--relation", "oscillation", "--samples", "60", "--seed", "2"),
    ):
        code, out, _ = run_cli(capsys, "crosscheck", *args)
        assert code == 0
        relation = args[1]
        assert out == (f"crosscheck relation={relation} samples=60 "
                       f"seed={args[5]} agreement=ok\n")


def test_crosscheck_determinism(capsys):
    a = run_cli(capsys, "crosscheck", "--relation", "e0", "--samples", "40", "--seed", "9")
    b = run_cli(capsys, "crosscheck", "--relation", "e0", "--samples", "40", "--seed", "9")
    assert a == b


# ---------------------------------------------------------------- exit codes

def test_wrong_code_disagrees_with_exit_4(capsys, workdir):
    code, _, err = run_cli(
        capsys, "crosscheck", "--relation", "e0", "--samples", "200", "--seed", "0",
        "--code", "idcode.s2f", "--config", str(workdir / "run.cfg"),
    )
    assert code == 4
    assert err.startswith("disagreement: sample 2:")
    assert "oracle=True evaluator=False" in err


def test_config_errors_exit_2(capsys, workdir, tmp_path):
    cases = [
        ("crosscheck", "--relation", "sim0", "--samples", "5"),           # no code
        ("crosscheck", "--relation", "oscillation", "--samples", "5",
         "--code", "e0.s2f", "--config", str(workdir / "run.cfg")),       # code forbidden
        ("simulate", "--relation", "e0", "--informant", "|0",
         "--learner", "constant:0"),                                      # missing target
        ("simulate", "--relation", "e0", "--target", "012|",
         "--informant", "|0", "--learner", "constant:0"),                 # bad literal
        ("simulate", "--relation", "mystery", "--target", "|0",
         "--informant", "|0", "--learner", "constant:0"),                 # unknown relation
        ("simulate", "--relation", "e0", "--target", "|0", "--informant", "|0",
         "--learner", "synth:absent.s2f"),                                # missing file
        ("simulate", "--relation", "e0", "--target", "|0", "--informant", "|0",
         "--learner", "constant:0", "--horizon", "0"),                    # bad horizon
        ("adversary", "--relation", "e0", "--learner", "constant:0"),     # wrong relation
    ]
    for argv in cases:
        code, _, err = run_cli(capsys, *argv)
        assert code == 2, argv
        assert err.startswith("error:"), argv


def test_unknown_config_key_exits_2(capsys, tmp_path):
    (tmp_path / "bad.cfg").write_text("wibble = 3\n")
    code, _, err = run_cli(capsys, "catalog", "--config", str(tmp_path / "bad.cfg"))
    assert code == 2
    assert "unknown key" in err


def test_contract_violation_exits_3(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--relation", "e0", "--target", "|0",
        "--informant", "|0", "1|0", "--learner", "bc2ex:constant:5",
        "--horizon", "4",
    )
    assert code == 3
    assert err.startswith("contract violation:")


def test_argparse_rejects_unknown_commands():
    with pytest.raises(SystemExit) as exc:
        main(["conjure"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main([])


# ------------------------------------------------------------ config parser

def test_parse_config_file_values():
    cfg = parse_config_file("relation = e0 # tail\n\n# note\nhorizon = 12\n")
    assert cfg == {"relation": "e0", "horizon": "12"}
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_file("relation e0\n")


def test_merge_rejects_bad_numbers(capsys, tmp_path):
    (tmp_path / "n.cfg").write_text("samples = many\n")
    code, _, err = run_cli(capsys, "catalog", "--config", str(tmp_path / "n.cfg"))
    assert code == 2 and "samples" in err
    (tmp_path / "m.cfg").write_text("seed = -3\n")
    code, _, err = run_cli(capsys, "catalog", "--config", str(tmp_path / "m.cfg"))
    assert code == 2 and "nonnegative" in err


def test_experiment_config_defaults(capsys):
    # the defaults samples=100 and seed=0 flow into the record unprompted
    code, out, _ = run_cli(capsys, "crosscheck", "--relation", "e0")
    assert code == 0
    assert out == "crosscheck relation=e0 samples=100 seed=0 agreement=ok\n"


# ------------------------------------------------------------ console script

def test_installed_console_script():
    proc = subprocess.run(
        ["limitlearn", "catalog"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == CATALOG_LINES
    assert proc.stderr == ""


def test_module_invocation_matches(capsys):
    proc = subprocess.run(
        [sys.executable, "-m", "limitlearn.cli", "catalog"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == CATALOG_LINES
