"""Result tables and reports, their CSV/JSON forms, and fixture comparison."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Union

from . import __version__
from .continuous_withdrawal import credibility_prob
from .credit_variant_b import CreditSchedule, simulate_unit_fund, summarize_fund
from .fund_model import FundParams
from .lump_sum import (
    BarrierPolicy,
    DeficitStep,
    barrier_expected_debt,
    barrier_expected_retained,
    barrier_payback_prob,
    expected_fund_after_forced_payback,
    expected_net_gain_vs_extra_investment,
    expected_pc_gain,
    expected_state_loss,
    full_payback_prob,
)
from .strategy_compare import lump_sum_default_prob, recommend_strategy

Cell = Union[float, str]

DECIMALS = {"probability": 8, "currency": 4, "real": 8}

STANDARD = FundParams(0.04, 0.2)
DIVERSIFIED = FundParams(0.04, 0.1)
TENTH = DeficitStep(1.0, 1.1)


@dataclass
class TableRow:
    label: str
    kind: str  # probability | currency | real | label
    values: list[Cell]
    source: str  # library operation that produced every cell of the row
    provenance: str = "closed-form"


@dataclass
class TableArtifact:
    table_id: int
    title: str
    row_header: str
    columns: list[str]
    rows: list[TableRow]
    metadata: dict[str, Any] = field(default_factory=dict)

    def row(self, label: str) -> TableRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def cell(self, row: str, column: str) -> Cell:
        return self.row(row).values[self.columns.index(column)]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TableArtifact":
        rows = [TableRow(**r) for r in data["rows"]]
        return cls(data["table_id"], data["title"], data["row_header"], list(data["columns"]), rows, dict(data["metadata"]))


@dataclass
class EvaluationReport:
    """Named scalar results of a single CLI evaluation."""

    name: str
    values: dict[str, Any]
    provenance: str = "closed-form"
    metadata: dict[str, Any] = field(default_factory=dict)


def _name(fn: Callable) -> str:
    return f"{fn.__module__}.{fn.__qualname__}"


def _fmt(value: Any, kind: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    return f"{value:.{DECIMALS.get(kind, 8)}f}"


def _fmt_col(x: float) -> str:
    return f"{x:g}"


# ---------------------------------------------------------------------------
# Builders, one per published table
# ---------------------------------------------------------------------------


def _variant_a_rows(params: FundParams, alphas: list[float], full: bool) -> list[TableRow]:
    ops = [
        ("P1", "probability", lambda a: full_payback_prob(params, a), full_payback_prob),
        ("E[L1]", "currency", lambda a: expected_state_loss(params, a, TENTH), expected_state_loss),
        ("E[G1]", "currency", lambda a: expected_pc_gain(params, a, TENTH), expected_pc_gain),
    ]
    if full:
        ops += [
            ("E[B1]", "currency", lambda a: expected_fund_after_forced_payback(params, a, TENTH),
             expected_fund_after_forced_payback),
            ("E[GA1]", "currency", lambda a: expected_net_gain_vs_extra_investment(params, a, TENTH),
             expected_net_gain_vs_extra_investment),
        ]
    return [TableRow(label, kind, [f(a) for a in alphas], _name(op)) for label, kind, f, op in ops]


def table_1(config=None) -> TableArtifact:
    alphas = [1, 1.05, 1.1, 1.15, 1.25, 2, 3]
    return TableArtifact(
        1, "Payback-first key quantities, mu=0.04 sigma=0.2, C0=1 C1=1.1", "quantity",
        [_fmt_col(a) for a in alphas], _variant_a_rows(STANDARD, alphas, True),
        {"mu": 0.04, "sigma": 0.2, "deficit": 0.1},
    )


def table_2(config=None) -> TableArtifact:
    alphas = [1, 1.05, 1.1, 1.15, 1.2, 1.25]
    return TableArtifact(
        2, "Payback-first key quantities, mu=0.04 sigma=0.1, C0=1 C1=1.1", "quantity",
        [_fmt_col(a) for a in alphas], _variant_a_rows(DIVERSIFIED, alphas, False),
        {"mu": 0.04, "sigma": 0.1, "deficit": 0.1},
    )


TABLE3_ALPHAS = [0.8, 0.9, 1, 1.25, 2, 10]
TABLE3_BARRIERS = [0.02, 0, -0.5, -0.75, -0.9, -0.95, -1]


def table_3(config=None) -> TableArtifact:
    rows = [
        TableRow(_fmt_col(b), "probability",
                 [barrier_payback_prob(STANDARD, BarrierPolicy(a, b)) for a in TABLE3_ALPHAS],
                 _name(barrier_payback_prob))
        for b in TABLE3_BARRIERS
    ]
    return TableArtifact(3, "Full repayment probability above barrier b", "b",
                         [_fmt_col(a) for a in TABLE3_ALPHAS], rows, {"mu": 0.04, "sigma": 0.2})


TABLE4_PAIRS = [(10, 0.030), (10, 0.005), (10, -0.070), (20, 0.153), (20, 0.100), (20, 0.009)]


def table_4(config=None) -> TableArtifact:
    policies = [BarrierPolicy(a, b) for a, b in TABLE4_PAIRS]
    rows = [
        TableRow("E[D1]", "currency", [barrier_expected_debt(STANDARD, p, TENTH) for p in policies],
                 _name(barrier_expected_debt)),
        TableRow("E[R1]", "currency", [barrier_expected_retained(STANDARD, p, TENTH) for p in policies],
                 _name(barrier_expected_retained)),
    ]
    cols = [f"alpha={a:g};b={b:.3f}" for a, b in TABLE4_PAIRS]
    return TableArtifact(4, "Expected payment to the state and retained fund", "quantity", cols, rows,
                         {"mu": 0.04, "sigma": 0.2, "deficit": 0.1})


VARIANT_B_ALPHAS = [1, 1.05, 1.1, 1.15, 1.2, 1.25]


def _variant_b_table(table_id: int, params: FundParams, samples: int, seed: int) -> TableArtifact:
    schedule = CreditSchedule.constant(0.1, 10)
    unit = simulate_unit_fund(schedule, params, samples, seed)
    results = [summarize_fund(a * unit, schedule.total, a, seed) for a in VARIANT_B_ALPHAS]
    prov = f"monte-carlo(seed={seed},samples={samples})"
    src = "mixpension.credit_variant_b.simulate_variant_b"
    rows = [
        TableRow("P_shortfall", "probability", [r.p_shortfall for r in results], src, prov),
        TableRow("E_shortfall", "currency", [r.e_shortfall for r in results], src, prov),
        TableRow("E_final_net_fund", "currency", [r.e_final_net_fund for r in results], src, prov),
    ]
    return TableArtifact(
        table_id, f"Granted credit over 10 years, mu={params.mu:g} sigma={params.sigma:g}", "quantity",
        [_fmt_col(a) for a in VARIANT_B_ALPHAS], rows,
        {"mu": params.mu, "sigma": params.sigma, "deficit": 0.1, "horizon": 10, "seed": seed, "samples": samples},
    )


def table_5(config=None) -> TableArtifact:
    samples, seed = _mc(config)
    return _variant_b_table(5, STANDARD, samples, seed)


def table_6(config=None) -> TableArtifact:
    samples, seed = _mc(config)
    return _variant_b_table(6, DIVERSIFIED, samples, seed)


CRED_BARRIERS = [-0.2, -0.1, -0.05, 0, 0.05]
CRED_ALPHAS = [1, 2, 3, 4, 5]


def _credibility_table(table_id: int, t: float) -> TableArtifact:
    rows = [
        TableRow(_fmt_col(b), "probability", [credibility_prob(STANDARD, b, a, t) for a in CRED_ALPHAS],
                 _name(credibility_prob))
        for b in CRED_BARRIERS
    ]
    return TableArtifact(table_id, f"P[D_t(b) >= 1/alpha], t={t:g}", "b",
                         [_fmt_col(a) for a in CRED_ALPHAS], rows, {"mu": 0.04, "sigma": 0.2, "t": t})


def table_7(config=None) -> TableArtifact:
    return _credibility_table(7, 1.0)


def table_8(config=None) -> TableArtifact:
    return _credibility_table(8, 10.0)


HORIZONS = [1, 2, 4, 6, 8, 10, 20, 40]
GRID_ALPHAS = list(range(1, 11))


def table_9(config=None) -> TableArtifact:
    p = 0.5 if config is None or getattr(config, "p", None) is None else config.p
    rows = []
    for t in HORIZONS:
        labels = [recommend_strategy(t, a, p, STANDARD).label.value for a in GRID_ALPHAS]
        rows.append(TableRow(str(t), "label", labels, _name(recommend_strategy), "quadrature"))
    return TableArtifact(9, f"Optimal strategy by horizon and multiplier, p={p:g}", "t",
                         [str(a) for a in GRID_ALPHAS], rows, {"mu": 0.04, "sigma": 0.2, "p": p})


def table_10(config=None) -> TableArtifact:
    rows = [
        TableRow(str(t), "probability", [lump_sum_default_prob(t, a, STANDARD) for a in GRID_ALPHAS],
                 _name(lump_sum_default_prob))
        for t in HORIZONS
    ]
    return TableArtifact(10, "Default probability of the lump-sum repayment", "t",
                         [str(a) for a in GRID_ALPHAS], rows, {"mu": 0.04, "sigma": 0.2})


BUILDERS: dict[int, Callable[..., TableArtifact]] = {
    1: table_1, 2: table_2, 3: table_3, 4: table_4, 5: table_5,
    6: table_6, 7: table_7, 8: table_8, 9: table_9, 10: table_10,
}


def _mc(config) -> tuple[int, int]:
    samples = getattr(config, "samples", None) or 10_000
    seed = getattr(config, "seed", None)
    return int(samples), int(2024 if seed is None else seed)


def run_table(table_id: int, config=None) -> TableArtifact:
    """Rebuild published table ``table_id`` (1..10) with this library."""
    try:
        builder = BUILDERS[int(table_id)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown table id {table_id!r}; expected 1..10") from None
    artifact = builder(config)
    artifact.metadata.setdefault("version", __version__)
    return artifact


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def to_csv(obj: Union[TableArtifact, EvaluationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(obj, TableArtifact):
        w.writerow([obj.row_header, *obj.columns, "provenance"])
        for r in obj.rows:
            w.writerow([r.label, *(_fmt(v, r.kind) for v in r.values), r.provenance])
    else:
        w.writerow(["quantity", "value"])
        for k, v in obj.values.items():
            w.writerow([k, _fmt(v, "real")])
        w.writerow(["provenance", obj.provenance])
    return buf.getvalue()


def to_json(obj: Union[TableArtifact, EvaluationReport]) -> str:
    data = asdict(obj)
    data.setdefault("metadata", {}).setdefault("version", __version__)
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def artifact_from_json(text: str) -> TableArtifact:
    return TableArtifact.from_dict(json.loads(text))


def emit(obj: Union[TableArtifact, EvaluationReport], fmt: str = "csv", path: Optional[Path] = None) -> str:
    """Serialize ``obj``; write to ``path`` when given (OSError propagates)."""
    if fmt == "csv":
        text = to_csv(obj)
    elif fmt == "json":
        text = to_json(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# Reference fixtures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixtureCell:
    row: str
    column: str
    reference: str
    tolerance: float
    status: str  # check | excluded
    note: str = ""


@dataclass(frozen=True)
class CellCheck:
    table_id: int
    cell: FixtureCell
    computed: Cell
    passed: bool

    def line(self) -> str:
        if self.cell.status == "excluded":
            verdict = "SKIP"
        else:
            verdict = "PASS" if self.passed else "FAIL"
        comp = self.computed if isinstance(self.computed, str) else f"{self.computed:.8g}"
        msg = f"[{verdict}] table {self.table_id} ({self.cell.row}, {self.cell.column}): computed {comp} reference {self.cell.reference}"
        return msg + (f"  # {self.cell.note}" if self.cell.note else "")


def load_fixture(path: Path) -> list[FixtureCell]:
    with open(path, newline="") as fh:
        return [
            FixtureCell(r["row"], r["column"], r["reference"], float(r["tolerance"] or 0), r["status"], r.get("note", ""))
            for r in csv.DictReader(fh)
        ]


def matches(computed: Cell, reference: str, tol: float) -> bool:
    """Compare a computed cell with a reference entry such as ``0.58``, ``<0.0001`` or ``LS``."""
    if isinstance(computed, str):
        return computed == reference
    if reference.startswith("<"):
        return computed < float(reference[1:])
    if reference.startswith(">"):
        return computed > float(reference[1:])
    return math.isfinite(computed) and abs(computed - float(reference)) <= tol


def compare_table(artifact: TableArtifact, cells: list[FixtureCell]) -> list[CellCheck]:
    out = []
    for c in cells:
        computed = artifact.cell(c.row, c.column)
        ok = c.status == "excluded" or matches(computed, c.reference, c.tolerance)
        out.append(CellCheck(artifact.table_id, c, computed, ok))
    return out


def fixture_path(directory: Path, table_id: int) -> Path:
    return Path(directory) / f"table_{table_id:02d}.csv"
