import numpy as np
import pytest

from mcemdsp.cli import main
from mcemdsp.genetics import Dataset, FamilyRecord
from mcemdsp.io import (
    FAMILY_COLUMNS,
    DataFormatError,
    format_value,
    read_families,
    read_pedigree,
    read_scan,
    write_families,
    write_tsv,
)
from mcemdsp.simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset

HEADER = "#" + "\t".join(FAMILY_COLUMNS) + "\n"
FAST = ["--mc-samples", "200", "--burnin", "50", "--max-iter", "3", "--seed", "1"]


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_format_value():
    assert format_value(3) == "3"
    assert format_value(True) == "1"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(np.float64(1.5)) == "1.5"


def test_roundtrip(tmp_path):
    data = simulate_dataset(DISEASE_MODELS[4], SCENARIOS[1], 30, True, seed=4)
    p = tmp_path / "fam.tsv"
    write_families(data, p)
    back = read_families(p)
    assert back.fingerprint == data.fingerprint
    assert [f.family_id for f in back.families] == [f.family_id for f in data.families]


@pytest.mark.parametrize("body, line, match", [
    ("A\t0\t0\t0\t0\t\t\nA\t0\t0\t0\t0\t\t\n", 3, "duplicate"),
    ("A\t0\t0\t3\t0\t\t\n", 2, "c1"),
    ("A\t0\t0\t1\t0\t\t\n", 2, "Mendel"),
    ("A\t1\t1\t1\t0\t1\t\n", 2, "statuses"),
    ("A\t1\t1\t1\t0\n", 2, "fields"),
    ("A\t1\t1\t1\t0\t1\t2\n", 2, "sib_statuses"),
])
def test_parse_errors(tmp_path, body, line, match):
    p = _write(tmp_path / "bad.tsv", HEADER + body)
    with pytest.raises(DataFormatError, match=match) as info:
        read_families(p)
    assert info.value.line == line
    assert f"bad.tsv:{line}:" in str(info.value)


def test_header_required(tmp_path):
    with pytest.raises(DataFormatError, match="header"):
        read_families(_write(tmp_path / "x.tsv", "A\t0\t0\t0\t0\t\t\n"))
    with pytest.raises(DataFormatError, match="does not match"):
        read_families(_write(tmp_path / "y.tsv", "#a\tb\n"))
    with pytest.raises(DataFormatError):
        read_families(str(tmp_path / "missing.tsv"))


def test_scan_parsing(tmp_path):
    ped = _write(tmp_path / "ped.tsv", "#family_id\tsib_statuses\nA\t1\nB\t\n")
    pedigree = read_pedigree(ped)
    assert pedigree == {"A": (1,), "B": ()}
    head = "#snp_id\tfamily_id\tm\tf\tc1\tc2\tsib_genotypes\n"
    ok = _write(tmp_path / "s.tsv", head + "s1\tA\t1\t1\t2\t0\t1\ns1\tB\t0\t0\t0\t0\t\ns2\tA\t0\t0\t0\t0\t0\n"
                "s2\tB\t0\t1\t1\t0\t\n")
    snps = read_scan(ok, pedigree)
    assert list(snps) == ["s1", "s2"] and len(snps["s1"]) == 2
    dup = _write(tmp_path / "d.tsv", head + "s1\tA\t0\t0\t0\t0\t0\ns1\tA\t0\t0\t0\t0\t0\n")
    with pytest.raises(DataFormatError, match="duplicate") as info:
        read_scan(dup, pedigree)
    assert info.value.line == 3
    with pytest.raises(DataFormatError, match="covers"):
        read_scan(_write(tmp_path / "c.tsv", head + "s1\tA\t0\t0\t0\t0\t0\n"), pedigree)
    assert len(read_scan(tmp_path / "c.tsv", pedigree, min_coverage=0.5)["s1"]) == 1


def test_write_tsv(tmp_path):
    p = tmp_path / "o.tsv"
    write_tsv(p, ("a", "b"), [(1, 0.25), ("x", False)])
    assert p.read_text() == "#a\tb\n1\t0.25\nx\t0\n"


def test_cli_exit_codes(tmp_path, capsys):
    fam = tmp_path / "fam.tsv"
    assert main(["simulate", "--model", "5", "--scenario", "2", "--n", "40", "--ds-plus",
                 "--seed", "3", "--out", str(fam)]) == 0
    assert len(read_families(fam)) == 40
    assert main(["fit", str(fam), *FAST, "--out", str(tmp_path / "fit.txt")]) == 0
    assert (tmp_path / "fit.txt.trace.tsv").exists()
    assert main(["test", str(fam), *FAST]) == 0
    out = capsys.readouterr().out
    assert "imprinting" in out
    bad = _write(tmp_path / "bad.tsv", HEADER + "A\t0\t0\t3\t0\t\t\n")
    assert main(["fit", bad, *FAST]) == 2
    assert "bad.tsv:2" in capsys.readouterr().err
    assert main(["fit", str(tmp_path / "nope.tsv")]) == 2
    with pytest.raises(SystemExit) as info:
        main(["fit"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["fit", str(fam), "--mc-samples", "0"])
    assert info.value.code == 1


def test_cli_verify(tmp_path, capsys):
    code = main(["verify", "--draws", "5", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0 and "FAIL" not in out
    # rows whose printed form differs are still reported
    assert "printed row 8\tprinted form differs" in out


def test_cli_power_and_scan(tmp_path):
    out = tmp_path / "power.tsv"
    assert main(["power", "--model", "1", "--scenario", "2", "--n", "30", "--replicates", "2",
                 *FAST, "--out", str(out)]) == 0
    assert out.exists() and (tmp_path / "power.tsv.replicates.tsv").exists()
    assert (tmp_path / "power.tsv.timing.tsv").exists()

    data = simulate_dataset(DISEASE_MODELS[1], SCENARIOS[2], 25, seed=2)
    ped = tmp_path / "ped.tsv"
    ped.write_text("#family_id\tsib_statuses\n" + "".join(f"{f.family_id}\t\n" for f in data.families))
    rows = ["#snp_id\tfamily_id\tm\tf\tc1\tc2\tsib_genotypes"]
    for snp in ("rs1", "rs2"):
        rows += [f"{snp}\t{f.family_id}\t{f.m}\t{f.f}\t{f.c1}\t{f.c2}\t" for f in data.families]
    scan = _write(tmp_path / "scan.tsv", "\n".join(rows) + "\n")
    res = tmp_path / "scan_out.tsv"
    assert main(["scan", scan, str(ped), *FAST, "--out", str(res)]) == 0
    text = res.read_text().splitlines()
    assert text[0].startswith("#") and len(text) == 3
