"""Reading and validating sweep CSVs.

The input contract is the harness CSV schema: a fixed nine-column
header, one row per (sweep value, scheme, metric) cell. Anything that
deviates is rejected with a diagnostic naming the offending columns.
"""

import csv
from dataclasses import dataclass

EXPECTED_HEADER = (
    "scenario",
    "param",
    "value",
    "scheme",
    "metric",
    "mean",
    "stderr",
    "n_runs",
    "seed",
)


class SchemaError(ValueError):
    """The CSV does not match the sweep schema."""


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    param: str
    value: float
    scheme: str
    metric: str
    mean: float
    stderr: float
    n_runs: int
    seed: int


def _check_header(header: list[str]):
    got = tuple(header)
    if got == EXPECTED_HEADER:
        return
    missing = [c for c in EXPECTED_HEADER if c not in got]
    extra = [c for c in got if c not in EXPECTED_HEADER]
    parts = []
    if missing:
        parts.append("missing column(s): " + ", ".join(missing))
    if extra:
        parts.append("unexpected column(s): " + ", ".join(extra))
    if not parts:  # same names, wrong order
        parts.append("column order must be " + ",".join(EXPECTED_HEADER))
    raise SchemaError("; ".join(parts))


def load_rows(path: str) -> list[SweepRow]:
    """Parse one sweep CSV; raises SchemaError on any deviation."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file, expected a header row") from None
        _check_header(header)
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(EXPECTED_HEADER):
                raise SchemaError(
                    f"line {lineno}: expected {len(EXPECTED_HEADER)} fields, "
                    f"got {len(rec)}"
                )
            try:
                rows.append(
                    SweepRow(
                        scenario=rec[0],
                        param=rec[1],
                        value=float(rec[2]),
                        scheme=rec[3],
                        metric=rec[4],
                        mean=float(rec[5]),
                        stderr=float(rec[6]),
                        n_runs=int(rec[7]),
                        seed=int(rec[8]),
                    )
                )
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from None
    return rows


def select_scenario(rows: list[SweepRow], scenario: str) -> list[SweepRow]:
    picked = [r for r in rows if r.scenario == scenario]
    if not picked:
        raise SchemaError(f"no rows for scenario {scenario}")
    return picked
