import json

import pytest
from openpyxl import load_workbook

from app.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def _settings(restore_settings):
    yield restore_settings


def run_json(capsys, *args):
    code = main(list(args))
    return code, json.loads(capsys.readouterr().out)


def test_indices(capsys):
    code, record = run_json(capsys, "indices", "--n", "1")
    assert code == EXIT_OK
    assert record["command"] == "indices"
    assert record["result"]["admissible"] == [2]


def test_indices_with_table_diff(capsys):
    code, record = run_json(capsys, "indices", "--b2", "7")
    assert code == EXIT_OK
    assert record["result"]["published_only"] == [24]


def test_hodge(capsys):
    code, record = run_json(capsys, "hodge", "--n", "3", "--d", "2")
    assert code == EXIT_OK
    assert record["result"]["hodge_row"] == [1, 0, 0, 0, 1, 0, 0]
    assert record["result"]["chi"] == 2


def test_hodge_rejects_non_divisor(capsys):
    assert main(["hodge", "--n", "3", "--d", "3"]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_missing_argument_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["hodge"])
    assert exc.value.code == EXIT_USAGE


def test_row_four_is_never_free(capsys):
    code, record = run_json(capsys, "action", "--row", "4", "--n", "5")
    assert code == EXIT_OK
    assert record["verdicts"][0]["status"] == "NOT_FREE"
    assert record["negative_finding"] is False


def test_expect_free_turns_non_free_into_exit_one(capsys):
    code, record = run_json(capsys, "action", "--row", "4", "--n", "5", "--expect-free")
    assert code == EXIT_NEGATIVE
    assert record["negative_finding"] is True


def test_row_one_free_translation(capsys):
    code, record = run_json(capsys, "action", "--row", "1", "--n", "1", "--z", "1/2", "--expect-free")
    assert code == EXIT_OK
    verdict = record["verdicts"][0]
    assert verdict["status"] == "FREE_BY_CRITERION"
    assert verdict["notes"]


def test_bad_levels(capsys):
    assert main(["action", "--row", "1", "--n", "1", "--levels", "0,2", "--mode", "bruteforce"]) == EXIT_USAGE


def test_row_and_lieberman_exclude_each_other():
    with pytest.raises(SystemExit):
        main(["action", "--row", "1", "--lieberman", "--n", "1"])


def test_lattice_antiinvariant(capsys):
    code, record = run_json(capsys, "lattice", "antiinvariant-k3")
    assert code == EXIT_OK
    result = record["result"]
    assert result["rank"] == 12
    assert result["signature"] == [2, 10]
    assert result["discriminant"] == [2] * 10
    assert result["matches_target"] is True


def test_lattice_from_file(capsys, tmp_path):
    gram = tmp_path / "gram.json"
    gram.write_text(json.dumps([[0, 1], [1, 0]]))
    code, record = run_json(capsys, "lattice", "file", "--gram-file", str(gram), "--roots-bound", "3")
    assert code == EXIT_OK
    assert record["result"]["roots"] == 2
    assert record["result"]["discriminant"] == []


def test_lattice_missing_file(capsys, tmp_path):
    assert main(["lattice", "file", "--gram-file", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_mukai_hilbert_scheme(capsys):
    code, record = run_json(capsys, "mukai", "--hilb-n", "3")
    assert code == EXIT_OK
    assert record["result"]["dim"] == 6
    assert record["result"]["admissible"] is True


def test_mukai_even_chi(capsys):
    code, record = run_json(capsys, "mukai", "--r", "2", "--chi", "2")
    assert code == EXIT_NEGATIVE
    assert "chi even" in record["result"]["failures"]


def test_mukai_l_of_wrong_length():
    assert main(["mukai", "--r", "1", "--chi", "1", "--l", "0,0,0"]) == EXIT_USAGE


def test_mukai_bare_zero_l(capsys):
    code, record = run_json(capsys, "mukai", "--r", "1", "--chi", "-1", "--l", "0")
    assert code == EXIT_OK
    assert record["parameters"]["l"] == [0] * 10


def test_q2hilb_parity(capsys):
    code, record = run_json(capsys, "q2hilb", "--set-size", "4", "--n", "2")
    assert code == EXIT_NEGATIVE
    assert record["result"]["free"] is False
    code, record = run_json(capsys, "q2hilb", "--set-size", "4", "--n", "3")
    assert code == EXIT_OK


def test_csv_output(capsys):
    assert main(["--format", "csv", "families", "--n", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "family,n,dim,chi,b2,candidates"
    assert len(lines) == 5


def test_text_output(capsys):
    assert main(["--format", "text", "action", "--row", "2", "--n", "2", "--z", "1/3"]) == EXIT_OK
    assert "FREE_BY_CRITERION" in capsys.readouterr().out


def test_xlsx_needs_output():
    with pytest.raises(SystemExit) as exc:
        main(["--format", "xlsx", "families"])
    assert exc.value.code == EXIT_USAGE


def test_xlsx_output(tmp_path):
    path = tmp_path / "families.xlsx"
    assert main(["--format", "xlsx", "-o", str(path), "families"]) == EXIT_OK
    wb = load_workbook(path)
    ws = wb["families"]
    assert ws["A1"].value == "family"
    assert ws.max_row == 5


def test_witness_round_trip(capsys, tmp_path):
    path = tmp_path / "record.json"
    code = main(["-o", str(path), "action", "--lieberman", "--a", "0", "--n", "1", "--mode", "bruteforce"])
    assert code == EXIT_OK
    record = json.loads(path.read_text())
    assert record["verdicts"][0]["status"] == "NOT_FREE"
    assert record["verdicts"][0]["witness"]

    code, checked = run_json(capsys, "verify-witness", "--record", str(path))
    assert code == EXIT_OK
    assert checked["result"]["valid"] is True


def test_record_without_witness(capsys, tmp_path):
    path = tmp_path / "record.json"
    assert main(["-o", str(path), "action", "--row", "1", "--n", "1", "--z", "1/2"]) == EXIT_OK
    assert main(["verify-witness", "--record", str(path)]) == EXIT_USAGE


def test_level_multiplier_flag(restore_settings, capsys):
    main(["--level-multiplier", "2", "indices", "--n", "1"])
    assert restore_settings.LEVEL_MULTIPLIER == 2
