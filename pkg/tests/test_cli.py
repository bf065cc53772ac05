import json

from relcore.cli import main
from relcore.definable import increasing_tuple_structure, sample
from relcore.atoms import DLO, make_sample
from relcore.finstruct import FinStructure, Signature


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_sample_gallery_jord2(capsys):
    code, out, _ = run(capsys, "sample", "gallery:Jord2", "--atoms", "3")
    assert code == 0
    data = json.loads(out)
    assert data["size"] == 3
    assert len(data["points"]) == 3


def test_sample_gallery_x(capsys):
    code, out, _ = run(capsys, "sample", "gallery:X", "--atoms", "3")
    assert code == 0
    assert json.loads(out)["size"] == 24


def test_sample_atom_list(capsys):
    code, out, _ = run(capsys, "sample", "gallery:QST", "--atoms", "0:0,1:1,2:0")
    assert code == 0
    data = json.loads(out)
    assert data["size"] == 3


def test_sample_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "sample", str(bad), "--atoms", "3")
    assert code == 2
    assert "error" in err


def test_sample_base_mismatch_exit(tmp_path, capsys):
    code, _, err = run(capsys, "sample", "gallery:QST", "--atoms", "0:0,1:7")
    assert code == 2


def test_hom_identity_iso(tmp_path, capsys):
    s = sample(increasing_tuple_structure(1), make_sample(DLO, 3)).structure
    f = tmp_path / "s.json"
    f.write_text(json.dumps(s.to_json()))
    code, out, _ = run(capsys, "hom", str(f), str(f), "--mode", "iso")
    assert code == 0
    assert json.loads(out)["map"] == [0, 1, 2]


def _write_clique(tmp_path, name, n):
    s = FinStructure(
        Signature((("E", 2),)),
        n,
        {"E": frozenset((i, j) for i in range(n) for j in range(n) if i != j)},
    )
    f = tmp_path / name
    f.write_text(json.dumps(s.to_json()))
    return f


def test_hom_clique_negative(tmp_path, capsys):
    k3 = _write_clique(tmp_path, "k3.json", 3)
    k2 = _write_clique(tmp_path, "k2.json", 2)
    code, out, _ = run(capsys, "hom", str(k3), str(k2))
    assert code == 1
    assert out.strip() == "none"


def test_hom_gallery_samples(capsys):
    code, out, _ = run(capsys, "hom", "gallery:X@3", "gallery:Y@3")
    assert code == 0
    assert "map" in json.loads(out)


def test_core_spider(capsys):
    code, out, _ = run(capsys, "core", "gallery:spider3")
    assert code == 0
    data = json.loads(out)
    assert data["core"]["size"] == 7
    assert data["was_core"] is False


def test_core_already_core(tmp_path, capsys):
    k3 = _write_clique(tmp_path, "k3.json", 3)
    code, out, _ = run(capsys, "core", str(k3))
    assert code == 0
    data = json.loads(out)
    assert data["was_core"] is True and data["core"]["size"] == 3


def test_is_core_exit_codes(tmp_path, capsys):
    k3 = _write_clique(tmp_path, "k3.json", 3)
    assert run(capsys, "is-core", str(k3))[0] == 0
    code, out, _ = run(capsys, "is-core", "gallery:spider2")
    assert code == 1
    assert json.loads(out) == {"is_core": False}


def test_endos_limit(tmp_path, capsys):
    k3 = _write_clique(tmp_path, "k3.json", 3)
    code, out, _ = run(capsys, "endos", str(k3))
    assert code == 0
    assert json.loads(out)["count"] == 6


def test_power_and_union(tmp_path, capsys):
    k2 = _write_clique(tmp_path, "k2.json", 2)
    code, out, _ = run(capsys, "power", str(k2), "--d", "2")
    assert code == 0
    assert json.loads(out)["size"] == 4
    code, out, _ = run(capsys, "union", str(k2), str(k2))
    assert code == 0
    assert json.loads(out)["size"] == 4


def test_orbits(capsys):
    code, out, _ = run(capsys, "orbits", "gallery:Jord1", "--n", "2")
    assert code == 0
    assert json.loads(out)["count"] == 3


def test_growth_sequences(capsys):
    code, out, _ = run(capsys, "growth", "gallery:QST", "--n", "5")
    assert code == 0
    assert out.strip() == "2,4,8,16,32"
    code, out, _ = run(capsys, "growth", "gallery:DLO", "--n", "5")
    assert out.strip() == "1,1,1,1,1"
    code, out, _ = run(capsys, "growth", "gallery:S2", "--n", "6", "--mode", "homogeneous")
    assert out.strip() == "1,1,2,2,4,6"


def test_classify_orders(capsys):
    code, out, _ = run(capsys, "classify-orders", "--d", "1")
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 2
    code, out, _ = run(capsys, "classify-orders", "--d", "2", "--emit-orbits")
    data = json.loads(out)
    assert data["count"] == 8
    assert all(entry["signed_lex"] is not None for entry in data["orders"])
    assert all("orbits" in entry for entry in data["orders"])


def test_verify_unknown_suite(capsys):
    code, _, err = run(capsys, "verify", "--suite", "nonexistent")
    assert code == 2
    assert "unknown suite" in err


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "spider")
    assert code == 0
    assert "[spider]" in out
    payload = json.loads(out[out.index("{"):])
    assert payload["overall"] == "pass"
    assert payload["report_version"] == 1


def test_deterministic_output(capsys):
    _, out1, _ = run(capsys, "sample", "gallery:Y", "--atoms", "4")
    _, out2, _ = run(capsys, "sample", "gallery:Y", "--atoms", "4")
    assert out1 == out2
