from __future__ import annotations

import csv
import json

import pytest

from conftest import brute_structure
from cyclored.census import (
    CensusReport,
    CheckpointCorrupt,
    classify_prime,
    inclusion_exclusion_check,
    run_census,
    split_count,
)
from cyclored.curve import CurveOverQ
from cyclored.modmath import sieve_primes

E1 = CurveOverQ(-3, 1)
E2 = CurveOverQ(2, 3)

# Frozen counts for the two smallest registry curves at x = 5000,
# cross-checked against the brute-force structure oracle below 150.
EX1_AT_5000 = dict(total=669, cyclic=440, bad=[2, 3],
                   split={2: 221, 3: 8, 5: 2, 7: 0}, display="0.6576")
EX2_AT_5000 = dict(total=669, cyclic=336, bad=[2, 5, 11],
                   split={2: 325, 3: 13, 5: 0, 7: 1}, display="0.5022")


def test_classify_prime_against_brute_force():
    for p in sieve_primes(100):
        cls = classify_prime(E1, p)
        assert cls.p == p
        if p in (2, 3):
            assert cls.status == "bad_reduction"
            continue
        n, d, e = brute_structure(p, -3 % p, 1)
        if d == 1:
            assert cls.status == "cyclic"
            assert cls.obstruction_primes == ()
        else:
            assert cls.status == "non_cyclic"
            assert cls.obstruction_primes
            for q in cls.obstruction_primes:
                assert d % q == 0
            prod = 1
            for q in cls.obstruction_primes:
                prod *= q
            # obstruction primes are exactly the radical of d
            rad = 1
            m = d
            for q in range(2, d + 1):
                if m % q == 0:
                    rad *= q
                    while m % q == 0:
                        m //= q
            assert prod == rad


def test_run_census_frozen_counts():
    for E, want in ((E1, EX1_AT_5000), (E2, EX2_AT_5000)):
        r = run_census(E, 5000)
        assert r.total_primes == want["total"]
        assert r.cyclic_count == want["cyclic"]
        assert r.bad_primes == want["bad"]
        assert r.split_counts == want["split"]
        assert r.cyclic_fraction_display == want["display"]
        assert r.limit == 5000
        assert r.elapsed_seconds >= 0


def test_report_derived_fields():
    r = run_census(E1, 5000, label="ex1")
    assert r.good_primes == 667
    assert r.noncyclic_count == 667 - 440
    assert r.cyclic_fraction_exact == "440/669"
    assert abs(r.cyclic_fraction - 440 / 669) < 1e-15
    # display is truncated, not rounded: 440/669 = 0.65769...
    assert r.cyclic_fraction_display == "0.6576"
    assert r.label == "ex1"


def test_report_json_round_trip():
    r = run_census(E2, 3000, label="ex2")
    d = r.to_json_dict()
    back = CensusReport.from_json_dict(json.loads(json.dumps(d)))
    assert back.to_json_dict() == d
    tampered = dict(d)
    tampered["good_primes"] = d["good_primes"] + 1
    with pytest.raises(CheckpointCorrupt):
        CensusReport.from_json_dict(tampered)


def test_run_census_validation():
    with pytest.raises(ValueError):
        run_census(E1, 1)
    with pytest.raises(ValueError):
        run_census(E1, 100, workers=0)


def strip_elapsed(report: CensusReport) -> dict:
    d = report.to_json_dict()
    d.pop("elapsed_seconds")
    return d


def test_checkpoint_resume_matches_scratch(tmp_path, monkeypatch):
    monkeypatch.setattr("cyclored.census.CHUNK_SIZE", 64)
    ck = str(tmp_path / "ck.jsonl")
    half = run_census(E1, 2500, checkpoint=ck)
    lines_after_half = open(ck).read().splitlines()
    assert json.loads(lines_after_half[0])["kind"] == "header"
    assert len(lines_after_half) > 2  # several chunk records

    resumed = run_census(E1, 5000, checkpoint=ck)
    scratch = run_census(E1, 5000)
    assert strip_elapsed(resumed) == strip_elapsed(scratch)
    assert strip_elapsed(half) == strip_elapsed(run_census(E1, 2500))

    # a third run over the same bound reuses every chunk without rewriting
    before = open(ck).read()
    again = run_census(E1, 5000, checkpoint=ck)
    assert strip_elapsed(again) == strip_elapsed(scratch)
    assert open(ck).read() == before


def test_checkpoint_corrupt_cases(tmp_path, monkeypatch):
    monkeypatch.setattr("cyclored.census.CHUNK_SIZE", 64)
    ck = str(tmp_path / "ck.jsonl")
    run_census(E1, 1500, checkpoint=ck)
    good_lines = open(ck).read().splitlines()

    def rewrite(lines):
        with open(ck, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    # empty file
    rewrite([""])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # garbage header
    rewrite(["{not json"] + good_lines[1:])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # header for a different curve
    wrong = dict(json.loads(good_lines[0]))
    wrong["a"] = 999
    rewrite([json.dumps(wrong)] + good_lines[1:])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # torn chunk record
    rewrite(good_lines[:-1] + [good_lines[-1][: len(good_lines[-1]) // 2]])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # record with inconsistent counts
    rec = dict(json.loads(good_lines[1]))
    rec["cyclic"] = rec["good"] + 5
    rewrite([good_lines[0], json.dumps(rec)] + good_lines[2:])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # two conflicting copies of one chunk
    rec = dict(json.loads(good_lines[1]))
    rec["cyclic"] -= 1
    rec["good"] -= 1
    rec["bad"] = list(rec["bad"]) + [9973]
    rewrite(good_lines + [json.dumps(rec)])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)

    # chunk tracking different split primes
    rewrite(good_lines)
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck, split_primes=(2, 3))

    # a record missing a required field
    rec = dict(json.loads(good_lines[1]))
    del rec["split"]
    rewrite([good_lines[0], json.dumps(rec)] + good_lines[2:])
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck)


def test_checkpoint_detects_silent_edit_on_recompute(tmp_path, monkeypatch):
    monkeypatch.setattr("cyclored.census.CHUNK_SIZE", 64)
    ck = str(tmp_path / "ck.jsonl")
    run_census(E1, 1500, checkpoint=ck)
    lines = open(ck).read().splitlines()
    rec = dict(json.loads(lines[1]))
    # stays internally consistent, so plain loading accepts it
    rec["cyclic"] = max(0, rec["cyclic"] - 1)
    with open(ck, "w") as fh:
        fh.write("\n".join([lines[0], json.dumps(rec)] + lines[2:]) + "\n")
    # CSV output forces every chunk to be recomputed, exposing the edit
    with pytest.raises(CheckpointCorrupt):
        run_census(E1, 1500, checkpoint=ck,
                   per_prime_csv=str(tmp_path / "pp.csv"))


def test_csv_outputs(tmp_path):
    pp = str(tmp_path / "per_prime.csv")
    fr = str(tmp_path / "fractions.csv")
    r = run_census(E1, 2000, per_prime_csv=pp, fraction_csv=fr)

    with open(pp) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["p", "status", "obstruction_primes"]
    assert len(rows) - 1 == r.total_primes
    by_p = {int(row[0]): row for row in rows[1:]}
    assert by_p[2][1] == "bad_reduction"
    for p in (5, 7, 11, 13, 101):
        cls = classify_prime(E1, p)
        assert by_p[p][1] == cls.status
        assert by_p[p][2] == ";".join(map(str, cls.obstruction_primes))

    with open(fr) as fh:
        frows = list(csv.reader(fh))
    assert frows[0] == ["p", "primes_seen", "cyclic_seen", "running_fraction"]
    assert len(frows) - 1 == r.total_primes
    last = frows[-1]
    assert int(last[1]) == r.total_primes
    assert int(last[2]) == r.cyclic_count
    assert last[3] == f"{r.cyclic_count / r.total_primes:.6f}"
    # running counts never decrease
    prev = 0
    for row in frows[1:]:
        assert int(row[2]) >= prev
        prev = int(row[2])


def test_csv_run_reuses_nothing_but_keeps_checkpoint(tmp_path, monkeypatch):
    monkeypatch.setattr("cyclored.census.CHUNK_SIZE", 64)
    ck = str(tmp_path / "ck.jsonl")
    first = run_census(E1, 2000, checkpoint=ck)
    n_lines = len(open(ck).read().splitlines())
    second = run_census(E1, 2000, checkpoint=ck,
                        per_prime_csv=str(tmp_path / "pp.csv"))
    assert strip_elapsed(first) == strip_elapsed(second)
    assert len(open(ck).read().splitlines()) == n_lines


def test_workers_agree(tmp_path, monkeypatch):
    monkeypatch.setattr("cyclored.census.CHUNK_SIZE", 64)
    solo = run_census(E2, 3000, workers=1)
    duo = run_census(E2, 3000, workers=2)
    assert strip_elapsed(solo) == strip_elapsed(duo)


def test_split_count():
    assert split_count(E1, 2, 3000) == 142
    r = run_census(E1, 5000)
    for l in (2, 3, 5, 7):
        assert split_count(E1, l, 5000) == r.split_counts[l], l
    with pytest.raises(ValueError):
        split_count(E1, 1, 100)


def test_inclusion_exclusion_frozen():
    rep = inclusion_exclusion_check(E1, 3000, 6)
    assert rep.terms == {1: 428, 2: 142, 3: 6, 6: 3}
    assert rep.direct_count == 283
    assert rep.moebius_sum == 283
    assert rep.consistent
    # the terms themselves satisfy in/out counting
    assert rep.direct_count == rep.terms[1] - rep.terms[2] - rep.terms[3] + rep.terms[6]


def test_inclusion_exclusion_various_moduli():
    for n in (1, 2, 4, 10, 30):
        rep = inclusion_exclusion_check(E2, 1200, n)
        assert rep.consistent, n
        assert rep.n == n
    # n = 4 behaves like its radical
    assert (inclusion_exclusion_check(E2, 1200, 4).terms
            == inclusion_exclusion_check(E2, 1200, 2).terms)
    with pytest.raises(ValueError):
        inclusion_exclusion_check(E2, 1200, 0)
