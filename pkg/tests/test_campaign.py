import math

import pytest
from hypothesis import given, strategies as st

from kummer import cli
from kummer.campaign.champions import ChampionLedger, champions
from kummer.campaign.histogram import (
    FILTERS,
    EmptySelectionError,
    HistogramSpec,
    histogram,
    histogram_values,
    resolve_filter,
)
from kummer.campaign.records import HEADER, KummerRecord, ScanFormatError, read_scan
from kummer.campaign.scan import compute_record, scan, spike_flags
from kummer.campaign.verify import (
    MissingRowError,
    load_reference,
    matches_truncated,
    truncate_significant,
    verify_table,
    verify_values,
)
from kummer.nt_core import is_prime, odd_primes_between

SCAN_MAX = 3000


@pytest.fixture(scope="module")
def small_scan(tmp_path_factory):
    path = tmp_path_factory.mktemp("scan") / "scan.csv"
    res = scan(SCAN_MAX, path, workers=1)
    return path, res


reals = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300)


@given(st.integers(3, 10**12), st.integers(2, 10**6), reals, reals, reals, reals,
       st.booleans(), st.booleans(), st.booleans(), st.booleans())
def test_record_roundtrip(q, g, r, big_r, e2, einf, f1, f2, f3, f4):
    rec = KummerRecord(q, g, r, big_r, e2, einf, f1, f2, f3, f4)
    line = rec.to_csv()
    assert "\n" not in line and '"' not in line
    assert KummerRecord.from_csv(line) == rec
    assert KummerRecord.from_csv(line).to_csv() == line


def test_record_rejects_bad_lines():
    for bad in ("3,2,0.1,1.1,0,0,1,1,1", "3,2,0.1,1.1,0,0,1,1,1,2", "x,2,0.1,1.1,0,0,1,1,1,1"):
        with pytest.raises(ValueError):
            KummerRecord.from_csv(bad)


def test_spike_flags_examples():
    assert spike_flags(11) == (True, False, False, True)
    assert spike_flags(5) == (True, False, False, True)
    assert spike_flags(3) == (True, True, True, True)


def test_scan_to_twenty(tmp_path):
    path = tmp_path / "s.csv"
    res = scan(20, path)
    rows = read_scan(path)
    assert [r.q for r in rows] == [3, 5, 7, 11, 13, 17, 19]
    assert res.rows_total == 7
    ref = load_reference()
    for rec in rows:
        assert matches_truncated(rec.R, ref[rec.q])
    assert path.read_text().splitlines()[0] == HEADER


def test_scan_rows_consistent(small_scan):
    path, _ = small_scan
    rows = read_scan(path)
    assert [r.q for r in rows] == odd_primes_between(3, SCAN_MAX)
    for rec in rows:
        assert float(format(math.exp(rec.r), ".15g")) == pytest.approx(rec.R, rel=2e-15)
        assert rec.flags == tuple(is_prime(m) for m in (2 * rec.q + 1, 2 * rec.q - 1, 4 * rec.q + 1, 4 * rec.q - 1))
        assert rec.e2_rel >= 0 and rec.einf >= 0


def test_scan_resume_after_truncation(small_scan, tmp_path):
    path, _ = small_scan
    data = path.read_bytes()
    cut = data.index(b"\n503,") + 1  # file ends after the q=499 row
    part = tmp_path / "part.csv"
    part.write_bytes(data[:cut])
    assert read_scan(part)[-1].q == 499
    res = scan(SCAN_MAX, part, resume=True)
    assert res.rows_written == len(odd_primes_between(503, SCAN_MAX))
    assert part.read_bytes() == data


def test_scan_workers_byte_identical(small_scan, tmp_path):
    path, _ = small_scan
    other = tmp_path / "w4.csv"
    scan(SCAN_MAX, other, workers=4)
    assert other.read_bytes() == path.read_bytes()


def test_resume_rejects_corrupt_files(small_scan, tmp_path):
    path, _ = small_scan
    data = path.read_bytes()
    cut = data.index(b"\n503,") + 1

    partial = tmp_path / "partial.csv"
    partial.write_bytes(data[: cut + 7])  # half a row
    with pytest.raises(ScanFormatError) as exc:
        scan(SCAN_MAX, partial, resume=True)
    assert exc.value.last_valid_q == 499

    gap = tmp_path / "gap.csv"
    lines = data[:cut].decode().splitlines(keepends=True)
    gap.write_text("".join(lines[:5] + lines[6:]))
    with pytest.raises(ScanFormatError):
        scan(SCAN_MAX, gap, resume=True)

    unsorted = tmp_path / "unsorted.csv"
    unsorted.write_text("".join([lines[0], lines[2], lines[1]]))
    with pytest.raises(ScanFormatError):
        read_scan(unsorted)

    header = tmp_path / "header.csv"
    header.write_text("q,R\n")
    with pytest.raises(ScanFormatError):
        scan(SCAN_MAX, header, resume=True)


def test_resume_on_missing_file_starts_fresh(tmp_path):
    path = tmp_path / "new.csv"
    scan(20, path, resume=True)
    assert [r.q for r in read_scan(path)] == [3, 5, 7, 11, 13, 17, 19]


def test_scan_validation(tmp_path):
    with pytest.raises(ValueError):
        scan(2, tmp_path / "x.csv")
    with pytest.raises(ValueError):
        scan(20, tmp_path / "x.csv", workers=0)


def test_compute_record_native_matches_pocketfft():
    a, b = compute_record(4391, engine="native"), compute_record(4391, engine="pocketfft")
    assert a.R == pytest.approx(b.R, rel=1e-11) and a.flags == b.flags


def test_champion_ledger_rules():
    hi = ChampionLedger("max")
    for q, r in [(3, 0.6), (5, 0.8), (7, 0.7), (11, 1.1), (13, 1.1)]:
        hi.update(q, r)
    assert hi.entries == [(3, 0.6), (5, 0.8), (11, 1.1)]
    lo = ChampionLedger("min", start_q=10)
    for q, r in [(3, 0.1), (11, 0.9), (13, 0.95), (17, 0.5)]:
        lo.update(q, r)
    assert lo.entries == [(11, 0.9), (17, 0.5)]
    with pytest.raises(ValueError):
        ChampionLedger("median")


def test_champions_online_equals_recomputed(small_scan):
    path, res = small_scan
    hi, lo = champions(path)
    assert hi.entries == res.max_ledger.entries
    assert lo.entries == res.min_ledger.entries
    for start in (10, 1000):
        hi, lo = champions(path, min_start_q=start)
        assert lo.entries and lo.entries[0][0] >= start
        rs = [e[1] for e in hi.entries]
        assert all(a < b for a, b in zip(rs, rs[1:]))
        rs = [e[1] for e in lo.entries]
        assert all(a > b for a, b in zip(rs, rs[1:]))
    hi, _ = champions(path)
    assert (2741, 1.49812101517667) in [(q, round(r, 14)) for q, r in hi.entries]


def test_champions_empty_input(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    hi, lo = champions(path)
    assert len(hi) == 0 and len(lo) == 0


def test_histogram_spec_validation():
    with pytest.raises(ValueError):
        HistogramSpec(bins=0)
    with pytest.raises(ValueError):
        HistogramSpec(lo=1, hi=1)
    with pytest.raises(ValueError):
        HistogramSpec(filter="nope")
    assert resolve_filter("only-2qpm1-prime") == "only-2q±1-prime"
    assert HistogramSpec().bins == 200 and (HistogramSpec().lo, HistogramSpec().hi) == (-0.6, 0.6)


def test_histogram_counts_and_overlay():
    values = [-0.5, -0.1, 0.0, 0.05, 0.2, 0.9]
    res = histogram_values(values, HistogramSpec(bins=4, lo=-0.6, hi=0.6))
    assert res.counts.tolist() == [1, 1, 3, 0]
    assert res.n == 6 and res.n_outside == 1
    assert res.mu == pytest.approx(sum(values) / 6)
    assert res.sigma == pytest.approx(math.sqrt(sum((v - res.mu) ** 2 for v in values) / 6))
    peak = 1 / (res.sigma * math.sqrt(2 * math.pi))
    assert res.overlay.max() <= peak
    assert histogram_values(values, HistogramSpec(bins=4, overlay=False)).overlay is None
    with pytest.raises(EmptySelectionError):
        histogram_values([], HistogramSpec())


def test_histogram_files_deterministic(small_scan, tmp_path):
    path, _ = small_scan
    outs = []
    for i in range(2):
        svg, data = tmp_path / f"h{i}.svg", tmp_path / f"h{i}.bins.csv"
        histogram(path, HistogramSpec(filter="exclude-2q±1-and-4q±1-prime"), svg, data)
        outs.append((svg.read_bytes(), data.read_bytes()))
    assert outs[0] == outs[1]
    text = outs[0][0].decode()
    assert text.startswith("<?xml") and 'version="1.1"' in text and text.rstrip().endswith("</svg>")
    assert "<polyline" in text
    assert len(outs[0][1].decode().splitlines()) == 202


def test_histogram_filters_partition(small_scan):
    path, _ = small_scan
    rows = read_scan(path)
    for name, pred in FILTERS.items():
        sel = [r for r in rows if pred(r.flags)]
        if name == "all":
            assert len(sel) == len(rows)
    n_ex = sum(FILTERS["exclude-2q±1-prime"](r.flags) for r in rows)
    n_only = sum(FILTERS["only-2q±1-prime"](r.flags) for r in rows)
    assert n_ex + n_only == len(rows)


def test_truncation_helpers():
    assert str(truncate_significant("1.489316072080934425611321346752", 10)) == "1.489316072"
    assert str(truncate_significant(0.6045997880780726, 10)) == "0.6045997880"
    assert matches_truncated(1.489316072080934, "1.489316072080934425611321346752")
    assert not matches_truncated(1.489316073, "1.489316072080934425611321346752")


def test_verify_table_passes_and_catches_tampering(small_scan, tmp_path):
    path, _ = small_scan
    rep = verify_table(path)
    assert rep.ok and len(rep.checked) == len([q for q in load_reference() if q <= SCAN_MAX])
    assert all(q > SCAN_MAX for q in rep.skipped)

    ref = load_reference()
    good = ref[1451]
    tampered = tmp_path / "ref.csv"
    lines = ["q,R_truncated"] + [f"{q},{v}" for q, v in sorted(ref.items())]
    lines = [ln.replace(good, good[:5] + str((int(good[5]) + 1) % 10) + good[6:]) for ln in lines]
    tampered.write_text("\n".join(lines) + "\n")
    rep = verify_table(path, tampered)
    assert [q for q, *_ in rep.failures] == [1451]


def test_verify_missing_row():
    with pytest.raises(MissingRowError):
        verify_values({3: 0.6045997880780726, 7: 0.9566751857508418}, load_reference(), max_q=7)


def test_reference_file_contents():
    ref = load_reference()
    assert set(odd_primes_between(3, 997)) <= set(ref)
    assert len([q for q in ref if q <= 997]) == 167
    assert ref[1451] == "1.489316072080934425611321346752"
    assert {37189, 42611, 149119, 198221, 305741, 401179} <= set(ref)


def test_cli_exit_codes(small_scan, tmp_path, capsys):
    path, _ = small_scan
    assert cli.main(["compute", "--q", "997"]) == 0
    assert "0.85575754491351" in capsys.readouterr().out
    assert cli.main(["compute", "--q", "101", "--method", "digamma"]) == 0
    assert cli.main(["compute", "--q", "100"]) == 2
    assert cli.main(["compute", "--q", "1000003", "--max-bytes", "1000"]) == 3
    assert cli.main(["verify", "--csv", str(path)]) == 0
    assert cli.main(["champions", "--csv", str(path)]) == 0
    assert cli.main(["budget", "--q", "9854964401", "--eps", "64"]) == 0
    assert "40527.695" in capsys.readouterr().out
    assert cli.main(["bounds", "--c1-limit", "101", "--lemma-T", "50"]) == 0
    assert cli.main(["maillet", "--q", "23"]) == 0
    assert "h1(23) = 3" in capsys.readouterr().out
    svg = tmp_path / "h.svg"
    assert cli.main(["hist", "--csv", str(path), "--filter", "only-4qpm1-prime", "--out", str(svg)]) == 0
    assert svg.exists() and (tmp_path / "h.bins.csv").exists()
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER + "\n")
    assert cli.main(["hist", "--csv", str(empty), "--out", str(tmp_path / "e.svg")]) == 1
    assert cli.main(["verify", "--csv", str(tmp_path / "missing.csv")]) == 3
    out = tmp_path / "cli.csv"
    assert cli.main(["scan", "--max", "50", "--out", str(out)]) == 0
    assert cli.main(["scan", "--max", "100", "--out", str(out), "--resume"]) == 0
    assert [r.q for r in read_scan(out)] == odd_primes_between(3, 100)
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_cli_verify_failure_exit(small_scan, tmp_path):
    path, _ = small_scan
    bad = tmp_path / "bad.csv"
    bad.write_text("q,R_truncated\n3,0.7045997880780726\n")
    assert cli.main(["verify", "--csv", str(path), "--reference", str(bad)]) == 1
