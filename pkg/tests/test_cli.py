import json

import pytest

from fuglede import cli


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def _run(capsys, *argv):
    code = cli.main(["--json", *argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.mark.parametrize("obj, spectral, tile", [
    ({"group": [6], "set": [0, 3]}, True, True),
    ({"group": [4], "set": [0, 1, 2]}, False, False),
    ({"group": [12], "set": list(range(12))}, True, True),
])
def test_analyze_examples(tmp_path, capsys, obj, spectral, tile):
    code, rep = _run(capsys, "analyze", _write(tmp_path, "s.json", obj))
    assert code == 0
    res = rep["result"]
    assert (res["spectral"], res["tile"]) == (spectral, tile)
    assert set(rep) == {"command", "input_digest", "result", "version"}


def test_analyze_profile_fields(tmp_path, capsys):
    _, rep = _run(capsys, "analyze", _write(tmp_path, "s.json", {"group": [6], "set": [0, 3]}))
    res = rep["result"]
    assert res["prime_power_support"] == [2]
    assert res["size"] == 2 and res["gcd_class"] == 2 and res["zero_set_size"] == 3
    assert res["T1"] and res["T2"] and res["proper_subgroup_order"] == 2
    assert dict(zip(res["divisors"], res["phi_divides"])) == {1: False, 2: True, 3: False, 6: True}


def test_analyze_product_group(tmp_path, capsys):
    code, rep = _run(capsys, "analyze", _write(tmp_path, "s.json", {"group": [2, 2], "set": [[0, 0], [1, 1]]}))
    assert code == 0 and rep["result"]["spectral"] and rep["result"]["T1"] is None


@pytest.mark.parametrize("content", ["{bad", "[1, 2]", json.dumps({"group": [1], "set": [0]}),
                                     json.dumps({"group": [6], "set": [0, 0]})])
def test_malformed_input_is_usage_error(tmp_path, capsys, content):
    assert cli.main(["analyze", _write(tmp_path, "bad.json", content)]) == cli.EXIT_USAGE


def test_missing_file_and_bad_args(tmp_path, capsys):
    assert cli.main(["tile", str(tmp_path / "nope.json")]) == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-command"])
    assert info.value.code == 2


def test_reports_are_deterministic(tmp_path, capsys):
    path = _write(tmp_path, "s.json", {"group": [8], "set": [0, 1, 4, 5]})
    first = _run(capsys, "spectral", path)
    second = _run(capsys, "spectral", path)
    assert first == second
    _, timed = _run(capsys, "--timing", "spectral", path)
    assert "timing" in timed and timed["input_digest"] == first[1]["input_digest"]


def test_global_flags_after_subcommand(tmp_path, capsys):
    path = _write(tmp_path, "s.json", {"group": [4], "set": [0, 2]})
    code = cli.main(["tile", path, "--json"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 0 and rep["result"] == {"tiles": True, "complement": [0, 1]}


def test_spectral_and_enumerate(tmp_path, capsys):
    path = _write(tmp_path, "s.json", {"group": [6], "set": [0, 3]})
    _, rep = _run(capsys, "spectral", path, "--enumerate", "2")
    assert rep["result"]["spectral"] and len(rep["result"]["spectra"]) == 2


def test_cyclo_and_mask(tmp_path, capsys):
    _, rep = _run(capsys, "cyclo", "12")
    assert rep["result"]["coefficients"] == [1, 0, -1, 0, 1]
    _, rep = _run(capsys, "cyclo", "6", "--mod-p", "2")
    assert rep["result"]["coefficients"] == [1, 1, 1]
    path = _write(tmp_path, "s.json", {"group": [6], "set": [0, 2, 4]})
    _, rep = _run(capsys, "mask", path, "--divides", "6")
    assert rep["result"]["divides"] is True
    _, rep = _run(capsys, "mask", path, "--divides", "2")
    assert rep["result"]["divides"] is False
    _, rep = _run(capsys, "mask", path, "--divides", "3", "--mod-p", "2")
    assert rep["result"]["divides"] is True
    _, rep = _run(capsys, "mask", path)
    assert rep["result"]["divisor_profile"] == [3, 6]
    assert cli.main(["mask", path, "--divides", "4"]) == cli.EXIT_USAGE


def test_structure_flags(tmp_path, capsys):
    path = _write(tmp_path, "s.json", {"group": [6], "set": [0, 2, 4]})
    _, rep = _run(capsys, "structure", path, "--cube-rule", "--decompose")
    assert rep["result"]["cube_rule"] == {"2": False, "3": True, "6": True}
    assert rep["result"]["decomposition"] == [{"axis": 1, "point": [0, 0], "coefficient": 1}]
    path = _write(tmp_path, "p.json", {"group": [8], "set": [0, 1, 2, 3]})
    _, rep = _run(capsys, "structure", path, "--padic")
    assert rep["result"]["padic"]["free_positions"] == [0, 1]
    assert cli.main(["structure", path]) == cli.EXIT_USAGE
    assert cli.main(["structure", path, "--decompose"]) == cli.EXIT_USAGE


def test_theorem(tmp_path, capsys):
    sub = {"group": [1332], "set": list(range(0, 1332, 36))}
    s = _write(tmp_path, "s.json", sub)
    code, rep = _run(capsys, "theorem", "--primes", "2", "3", "37", "--set", s, "--spectrum", s)
    assert code == 0 and rep["result"]["complement"] == list(range(36))
    assert [step["case"] for step in rep["result"]["trace"]][-1] == "CLAIM_UNION_ZR"
    bad = _write(tmp_path, "b.json", {"group": [1332], "set": [0, 1]})
    code, rep = _run(capsys, "theorem", "--primes", "2", "3", "37", "--set", s, "--spectrum", bad)
    assert code == cli.EXIT_USAGE and rep["result"]["error"] == "NotSpectral"
    assert cli.main(["theorem", "--primes", "2", "3", "4", "--set", s, "--spectrum", s]) == cli.EXIT_USAGE


def test_theorem_strict_contradiction_exit(tmp_path, capsys):
    from fuglede.corpus import small_pairs, twisted_product
    S, L = twisted_product(36, (tuple(range(6)), tuple(range(0, 36, 6))), 37, small_pairs(37)[1])
    s = _write(tmp_path, "s.json", {"group": [1332], "set": list(S)})
    lam = _write(tmp_path, "l.json", {"group": [1332], "set": list(L)})
    code, rep = _run(capsys, "theorem", "--primes", "2", "3", "37", "--set", s, "--spectrum", lam, "--strict")
    assert code == cli.EXIT_CONTRADICTION and rep["result"]["trace"]
    code, rep = _run(capsys, "theorem", "--primes", "2", "3", "37", "--set", s, "--spectrum", lam)
    assert code == 0 and len(rep["result"]["complement"]) == 6


def test_fuglede_scan(tmp_path, capsys):
    code, rep = _run(capsys, "fuglede-scan", "10", "--out", str(tmp_path))
    assert code == 0 and rep["result"]["violations"] == [] and rep["result"]["checked"] == 512
    code, rep = _run(capsys, "fuglede-scan", "30", "--mode", "sample", "--samples", "20", "--seed", "9")
    assert code == 0 and rep["result"]["mode"] == "sample"
    assert cli.main(["fuglede-scan", "30"]) == cli.EXIT_USAGE


def test_fuglede_scan_violation_writes_certificate(tmp_path, capsys, monkeypatch):
    from fuglede import scan

    real = scan.fuglede_scan

    def planted(*args, **kwargs):
        rep = real(*args, **kwargs)
        rep.violations.append({"set": [0, 1], "spectral": True, "tile": False})
        return rep

    monkeypatch.setattr(scan, "fuglede_scan", planted)
    code, rep = _run(capsys, "fuglede-scan", "4", "--out", str(tmp_path))
    assert code == cli.EXIT_VIOLATION
    written = json.loads((tmp_path / "fuglede-scan-4-exhaustive-violations.json").read_text())
    assert written["violations"] == [{"set": [0, 1], "spectral": True, "tile": False}]


def test_hadamard_and_tao(tmp_path, capsys):
    code, rep = _run(capsys, "hadamard", "--size", "3", "--order", "3")
    assert code == 0 and rep["result"]["matrix"] == [[0, 0, 0], [0, 1, 2], [0, 2, 1]]
    code, rep = _run(capsys, "tao", "--out", str(tmp_path))
    assert code == 0 and rep["result"]["spectral"] and not rep["result"]["tile"]
    assert (tmp_path / "tao-spectral.json").exists() and (tmp_path / "tao-nontile.json").exists()


def test_human_output(tmp_path, capsys):
    path = _write(tmp_path, "s.json", {"group": [4], "set": [0, 2]})
    assert cli.main(["tile", path]) == 0
    out = capsys.readouterr().out
    assert out.startswith("tile") and "tiles: True" in out
