"""Prime-by-prime cyclicity census for the reductions of a rational curve.

For every prime p up to a bound the reduced point group is classified as
cyclic or not, with bad primes tracked separately.  Work proceeds in fixed
chunks of primes so long runs can checkpoint to a line-delimited JSON file
and resume later, even when the resumed run asks for a different bound.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
import time
from dataclasses import dataclass, field

from .curve import (
    BadReduction,
    CurveOverQ,
    ReducedCurve,
    group_structure,
    has_full_ell_torsion,
    reduce,
)
from .modmath import factorize, moebius, sieve_primes
from .utils import truncate_decimal

CHUNK_SIZE = 4096
DEFAULT_SPLIT_PRIMES = (2, 3, 5, 7)
_CHECKPOINT_VERSION = 1


class CheckpointCorrupt(Exception):
    """Resume file failed validation (bad JSON, wrong curve, torn record)."""


@dataclass(frozen=True)
class PrimeClassification:
    p: int
    status: str  # "bad_reduction" | "cyclic" | "non_cyclic"
    obstruction_primes: tuple[int, ...] = ()


@dataclass
class CensusReport:
    a: int
    b: int
    limit: int
    total_primes: int
    bad_primes: list[int]
    cyclic_count: int
    split_counts: dict[int, int]
    elapsed_seconds: float
    label: str | None = None
    chunk_size: int = CHUNK_SIZE
    schema_version: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def good_primes(self) -> int:
        return self.total_primes - len(self.bad_primes)

    @property
    def noncyclic_count(self) -> int:
        return self.good_primes - self.cyclic_count

    @property
    def cyclic_fraction(self) -> float:
        return self.cyclic_count / self.total_primes

    @property
    def cyclic_fraction_exact(self) -> str:
        return f"{self.cyclic_count}/{self.total_primes}"

    @property
    def cyclic_fraction_display(self) -> str:
        # Four decimal places, truncated: matches the published table style.
        return truncate_decimal(self.cyclic_count, self.total_primes, 4)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "label": self.label,
            "a": self.a,
            "b": self.b,
            "limit": self.limit,
            "chunk_size": self.chunk_size,
            "total_primes": self.total_primes,
            "bad_primes": list(self.bad_primes),
            "good_primes": self.good_primes,
            "cyclic_count": self.cyclic_count,
            "noncyclic_count": self.noncyclic_count,
            "cyclic_fraction": self.cyclic_fraction,
            "cyclic_fraction_exact": self.cyclic_fraction_exact,
            "cyclic_fraction_display": self.cyclic_fraction_display,
            "split_counts": {str(l): n for l, n in sorted(self.split_counts.items())},
            "elapsed_seconds": self.elapsed_seconds,
            "extra": self.extra,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CensusReport":
        rep = cls(
            a=d["a"],
            b=d["b"],
            limit=d["limit"],
            total_primes=d["total_primes"],
            bad_primes=list(d["bad_primes"]),
            cyclic_count=d["cyclic_count"],
            split_counts={int(k): v for k, v in d["split_counts"].items()},
            elapsed_seconds=d["elapsed_seconds"],
            label=d.get("label"),
            chunk_size=d.get("chunk_size", CHUNK_SIZE),
            schema_version=d.get("schema_version", 1),
            extra=d.get("extra", {}),
        )
        for key in ("good_primes", "noncyclic_count", "cyclic_fraction_exact"):
            if key in d and getattr(rep, key) != type(getattr(rep, key))(d[key]):
                raise CheckpointCorrupt(f"inconsistent derived field {key!r}")
        return rep


def classify_prime(curve: CurveOverQ, p: int) -> PrimeClassification:
    """Classify one prime: bad reduction, cyclic group, or non-cyclic group.

    For non-cyclic groups the obstruction primes are the prime divisors of
    the first group invariant d (the primes with full torsion at p).
    """
    try:
        C = reduce(curve, p)
    except BadReduction:
        return PrimeClassification(p, "bad_reduction")
    st = group_structure(C)
    if st.d == 1:
        return PrimeClassification(p, "cyclic")
    obst = tuple(q for q, _ in factorize(st.d))
    return PrimeClassification(p, "non_cyclic", obst)


def _classify_chunk(args):
    """Worker body: classify one chunk of primes for curve (a, b).

    Module-level so multiprocessing can pickle it.  Returns the chunk
    record plus per-prime rows when requested.
    """
    a, b, delta, primes, split_primes, want_rows = args
    bad: list[int] = []
    cyclic = 0
    good = 0
    split = {l: 0 for l in split_primes}
    rows: list[tuple[int, str, tuple[int, ...]]] | None = [] if want_rows else None
    for p in primes:
        if delta % p == 0:
            bad.append(p)
            if rows is not None:
                rows.append((p, "bad_reduction", ()))
            continue
        st = group_structure(ReducedCurve(p, a % p, b % p))
        good += 1
        if st.d == 1:
            cyclic += 1
            if rows is not None:
                rows.append((p, "cyclic", ()))
        else:
            obst = tuple(q for q, _ in factorize(st.d))
            for q in obst:
                if q in split:
                    split[q] += 1
            if rows is not None:
                rows.append((p, "non_cyclic", obst))
    record = {
        "kind": "chunk",
        "first": primes[0],
        "last": primes[-1],
        "count": len(primes),
        "good": good,
        "cyclic": cyclic,
        "bad": bad,
        "split": {str(l): split[l] for l in split_primes},
    }
    return record, rows


def _load_checkpoint(path: str, a: int, b: int, split_primes) -> dict:
    """Parse a resume file, validating the header and every chunk record."""
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CheckpointCorrupt("checkpoint file is empty")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CheckpointCorrupt(f"unreadable header: {exc}") from None
    if (
        not isinstance(head, dict)
        or head.get("kind") != "header"
        or head.get("version") != _CHECKPOINT_VERSION
    ):
        raise CheckpointCorrupt("missing or unsupported header record")
    if head.get("a") != a or head.get("b") != b:
        raise CheckpointCorrupt(
            f"checkpoint belongs to curve ({head.get('a')}, {head.get('b')}), "
            f"not ({a}, {b})"
        )
    want_split = sorted(str(l) for l in split_primes)
    records: dict[tuple[int, int, int], dict] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CheckpointCorrupt(f"unreadable chunk record: {exc}") from None
        needed = ("kind", "first", "last", "count", "good", "cyclic", "bad", "split")
        if not isinstance(rec, dict) or any(k not in rec for k in needed):
            raise CheckpointCorrupt("chunk record is missing fields")
        if rec["kind"] != "chunk":
            raise CheckpointCorrupt(f"unexpected record kind {rec['kind']!r}")
        if rec["good"] + len(rec["bad"]) != rec["count"] or rec["cyclic"] > rec["good"]:
            raise CheckpointCorrupt("chunk record counts are inconsistent")
        if sorted(rec["split"].keys()) != want_split:
            raise CheckpointCorrupt("chunk record tracks different split primes")
        key = (rec["first"], rec["last"], rec["count"])
        old = records.get(key)
        if old is not None and old != rec:
            raise CheckpointCorrupt(f"conflicting records for chunk {key}")
        records[key] = rec
    return records


def run_census(
    curve: CurveOverQ,
    x: int,
    *,
    checkpoint: str | None = None,
    workers: int = 1,
    per_prime_csv: str | None = None,
    fraction_csv: str | None = None,
    split_primes: tuple[int, ...] = DEFAULT_SPLIT_PRIMES,
    label: str | None = None,
) -> CensusReport:
    """Classify every prime p <= x and aggregate the counts.

    Checkpointing: with `checkpoint` set, finished chunks are appended to a
    line-delimited JSON file and reused on the next call, even if that call
    asks for a different x (chunks are keyed by their prime range, which
    does not depend on the bound).  A malformed file raises
    CheckpointCorrupt rather than silently recomputing.

    The CSV side outputs need a row for every prime, so requesting either
    one disables chunk reuse for that run (the checkpoint file is still
    written).  The denominators of the reported fractions count all primes
    up to x, including 2 and the primes of bad reduction.
    """
    if x < 2:
        raise ValueError("census bound must be at least 2")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    start = time.monotonic()
    delta = curve.delta_E
    primes = sieve_primes(x)
    chunks = [primes[i : i + CHUNK_SIZE] for i in range(0, len(primes), CHUNK_SIZE)]

    want_rows = per_prime_csv is not None or fraction_csv is not None
    saved: dict[tuple[int, int, int], dict] = {}
    ck_fh = None
    if checkpoint is not None:
        import os

        if os.path.exists(checkpoint):
            saved = _load_checkpoint(checkpoint, curve.A, curve.B, split_primes)
        else:
            with open(checkpoint, "w") as fh:
                fh.write(
                    json.dumps(
                        {
                            "kind": "header",
                            "version": _CHECKPOINT_VERSION,
                            "a": curve.A,
                            "b": curve.B,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        ck_fh = open(checkpoint, "a")

    pp_writer = pp_fh = None
    fr_writer = fr_fh = None
    if per_prime_csv is not None:
        pp_fh = open(per_prime_csv, "w", newline="")
        pp_writer = csv.writer(pp_fh)
        pp_writer.writerow(["p", "status", "obstruction_primes"])
    if fraction_csv is not None:
        fr_fh = open(fraction_csv, "w", newline="")
        fr_writer = csv.writer(fr_fh)
        fr_writer.writerow(["p", "primes_seen", "cyclic_seen", "running_fraction"])

    tasks = []
    reused: dict[int, dict] = {}
    for i, chunk in enumerate(chunks):
        key = (chunk[0], chunk[-1], len(chunk))
        if not want_rows and key in saved:
            reused[i] = saved[key]
        else:
            tasks.append((i, (curve.A, curve.B, delta, chunk, split_primes, want_rows)))

    computed: dict[int, tuple[dict, list | None]] = {}
    try:
        if workers > 1 and len(tasks) > 1:
            with multiprocessing.Pool(workers) as pool:
                for (i, _), out in zip(
                    tasks, pool.imap(_classify_chunk, [t for _, t in tasks])
                ):
                    computed[i] = out
        else:
            for i, t in tasks:
                computed[i] = _classify_chunk(t)

        bad_all: list[int] = []
        cyclic = 0
        seen = 0
        split_totals = {l: 0 for l in split_primes}
        for i in range(len(chunks)):
            if i in reused:
                rec, rows = reused[i], None
            else:
                rec, rows = computed[i]
                key = (rec["first"], rec["last"], rec["count"])
                if ck_fh is not None and saved.get(key) != rec:
                    if key in saved:
                        raise CheckpointCorrupt(
                            f"recomputed chunk {key} disagrees with checkpoint"
                        )
                    ck_fh.write(json.dumps(rec, sort_keys=True) + "\n")
                    ck_fh.flush()
            bad_all.extend(rec["bad"])
            for l in split_primes:
                split_totals[l] += rec["split"][str(l)]
            if rows is not None:
                for p, status, obst in rows:
                    seen += 1
                    if status == "cyclic":
                        cyclic += 1
                    if pp_writer is not None:
                        pp_writer.writerow([p, status, ";".join(map(str, obst))])
                    if fr_writer is not None:
                        fr_writer.writerow(
                            [p, seen, cyclic, f"{cyclic / seen:.6f}"]
                        )
            else:
                seen += rec["count"]
                cyclic += rec["cyclic"]
    finally:
        if ck_fh is not None:
            ck_fh.close()
        if pp_fh is not None:
            pp_fh.close()
        if fr_fh is not None:
            fr_fh.close()

    elapsed = time.monotonic() - start
    return CensusReport(
        a=curve.A,
        b=curve.B,
        limit=x,
        total_primes=len(primes),
        bad_primes=sorted(bad_all),
        cyclic_count=cyclic,
        split_counts=split_totals,
        elapsed_seconds=elapsed,
        label=label,
    )


def split_count(curve: CurveOverQ, l: int, x: int) -> int:
    """Count good primes p <= x whose reduction has full l-torsion.

    Full l-torsion forces l | p - 1, so primes outside that progression
    are skipped without computing a group order.  The prime p = l itself
    never qualifies and is skipped.
    """
    if l < 2:
        raise ValueError("torsion prime must be at least 2")
    delta = curve.delta_E
    count = 0
    for p in sieve_primes(x):
        if p % l != 1 or delta % p == 0:
            continue
        if has_full_ell_torsion(ReducedCurve(p, curve.A % p, curve.B % p), l):
            count += 1
    return count


@dataclass(frozen=True)
class InclusionExclusionReport:
    n: int
    limit: int
    direct_count: int
    moebius_sum: int
    terms: dict[int, int]  # m -> #{good p <= x with full m-torsion}

    @property
    def consistent(self) -> bool:
        return self.direct_count == self.moebius_sum


def inclusion_exclusion_check(curve: CurveOverQ, x: int, n: int) -> InclusionExclusionReport:
    """Cross-check the sieve identity behind the density over the primes of n.

    Counts good p <= x with no full l-torsion for any prime l | n two ways:
    directly, and as sum over squarefree m | n of mu(m) times the number of
    primes with full m-torsion (full l-torsion for every prime l | m).
    Both counts come from one pass of exact group structures, so equality
    is a genuine consistency check of the classification code.
    """
    if n < 1:
        raise ValueError("modulus must be at least 1")
    ell = tuple(q for q, _ in factorize(n)) if n > 1 else ()
    delta = curve.delta_E
    direct = 0
    # Squarefree divisors of n, as subsets of its prime support.
    sq_divs = [1]
    for q in ell:
        sq_divs.extend(m * q for m in list(sq_divs))
    full_counts = {m: 0 for m in sq_divs}
    for p in sieve_primes(x):
        if delta % p == 0:
            continue
        st = group_structure(ReducedCurve(p, curve.A % p, curve.B % p))
        torsion = {q for q in ell if st.d % q == 0}
        if not torsion:
            direct += 1
        for m in sq_divs:
            if all(q in torsion for q in ell if m % q == 0):
                full_counts[m] += 1
    msum = sum(moebius(m) * full_counts[m] for m in sq_divs)
    return InclusionExclusionReport(
        n=n, limit=x, direct_count=direct, moebius_sum=msum, terms=full_counts
    )
