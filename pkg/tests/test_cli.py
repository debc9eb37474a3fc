import hashlib
import json

import pytest

from tlstoch.cli import main, parse_sizes


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_states(capsys):
    code, data = run(capsys, "states", "6", "closed")
    assert code == 0 and data["count"] == 5
    code, data = run(capsys, "states", "4", "dc")
    assert data["count"] == 6


def test_bad_parity_is_usage_error(capsys):
    assert main(["states", "5", "dc"]) == 1


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["states", "x", "closed"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["states", "4", "torus"])
    assert exc.value.code == 1


def test_stationary(capsys):
    assert run(capsys, "stationary", "6", "closed")[1]["S"] == "26"
    assert run(capsys, "stationary", "6", "ic")[1]["S"] == "7"
    assert run(capsys, "stationary", "5", "podd")[1]["S"] == "25"


@pytest.mark.parametrize("L,bc", [(6, "closed"), (6, "dc"), (7, "closed")])
def test_verify(capsys, L, bc):
    code, data = run(capsys, "verify", str(L), bc)
    assert code == 0 and data["match"]


def test_verify_mismatch_exit_code(capsys, monkeypatch):
    import tlstoch.cli as cli
    from tlstoch.fpl import ConjectureReport
    from tlstoch.linkstates import BC

    def fake(L, bc, engine):
        return ConjectureReport(L, BC.parse(bc), 1, 2, 3, [("x", 2, 3)], None)

    monkeypatch.setattr(cli, "verify_conjecture", fake)
    assert main(["verify", "4", "closed"]) == 3


def test_counts(capsys):
    code, data = run(capsys, "counts", "--sequence", "asm", "--upto", "4")
    assert [t["value"] for t in data["terms"]] == ["1", "2", "7", "42"]


def test_simulate(capsys):
    code, data = run(capsys, "simulate", "4", "closed", "--seed", "1", "--events", "20000")
    assert code == 0 and data["tv_distance"] < 0.05


def test_spectrum(capsys):
    code, data = run(capsys, "--threads", "2", "spectrum", "--sector", "1", "--sizes", "8..12")
    assert code == 0 and abs(data["delta"] - 1 / 3) < 0.05


def test_sizes_parser():
    assert parse_sizes("8..16") == [8, 10, 12, 14, 16]
    assert parse_sizes("7,9,11") == [7, 9, 11]


def test_manifest_and_reproducibility(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["--out", str(out1), "stationary", "6", "dc", "--format", "csv"]) == 0
    assert main(["--out", str(out2), "stationary", "6", "dc", "--format", "csv"]) == 0
    capsys.readouterr()
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["command"] == "stationary"
    assert manifest["parameters"]["bc"] == "dc"
    for name, digest in manifest["files"].items():
        data = (out1 / name).read_bytes()
        assert hashlib.sha256(data).hexdigest() == digest
        assert data == (out2 / name).read_bytes()


def test_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("TLSTOCH_THREADS", "many")
    assert main(["spectrum", "--sector", "1", "--sizes", "4,6,8"]) == 1
