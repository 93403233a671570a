"""Report assembly: delimited tables, JSON envelopes, and rendered figures.

Every command produces one table (columns + rows) plus metadata.  CSV
carries the table alone with full precision; JSON carries the whole
envelope and validates against ``schemas/report.schema.json``.  When a
figure is requested it is rendered to a PNG next to the delimited
output; nothing is ever displayed interactively.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import ContractViolation

TOOL_NAME = "polbench"
TOOL_VERSION = "0.1.0"

#: Wording attached to every table produced under the amplitude-level model.
ANSATZ_NOTE = (
    "ansatz rates come from a non-physical amplifier model with no "
    "trace-preserving realization; they quantify the conjecture under "
    "audit, not achievable physics"
)

#: Significant digits for delimited numeric output (>= 12 required).
_SIG_DIGITS = 15


@dataclass
class Report:
    command: str
    columns: list[str]
    rows: list[list]
    scenario: str | None = None
    model: dict | None = None
    model_note: str | None = None
    summary: dict | None = None
    trials: int | None = None
    seed: int | None = None
    extras: dict = field(default_factory=dict)


def format_number(value) -> str:
    """Decimal text round-tripping floats at full precision."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf"
    return f"{value:.{_SIG_DIGITS}g}"


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow(
            "" if v is None else v if isinstance(v, str) else format_number(v)
            for v in row
        )
    return buf.getvalue()


def to_json_dict(report: Report) -> dict:
    out = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": report.command,
        "columns": list(report.columns),
        "rows": [[_jsonable(v) for v in row] for row in report.rows],
    }
    for key in ("scenario", "model", "model_note", "summary", "trials", "seed"):
        value = getattr(report, key)
        if value is not None:
            out[key] = value
    out.update(report.extras)
    return out


def to_json(report: Report) -> str:
    return json.dumps(to_json_dict(report), indent=2, sort_keys=False) + "\n"


def write_report(report: Report, fmt: str, out_path: str | None) -> None:
    """Serialize to a file, or stdout when no path is given."""
    if fmt not in ("csv", "json"):
        raise ContractViolation(f"format must be 'csv' or 'json', got {fmt!r}")
    text = to_csv(report) if fmt == "csv" else to_json(report)
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def render_figure(report: Report, png_path: str) -> None:
    """Draw the table and save it: curves along the first numeric column
    when the table sweeps one, a bar chart of one configuration otherwise."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=130)
    numeric_cols = _numeric_columns(report)
    if len(report.rows) > 1 and numeric_cols and numeric_cols[0] == 0:
        x = [row[0] for row in report.rows]
        for col in numeric_cols[1:]:
            y = [row[col] for row in report.rows]
            ax.plot(x, y, marker=".", linewidth=1.2, label=report.columns[col])
        ax.set_xlabel(report.columns[0])
        ax.set_ylabel("rate")
        ax.legend(fontsize=8, loc="best")
    else:
        row = report.rows[-1] if report.rows else []
        labels = [report.columns[c] for c in numeric_cols]
        values = [row[c] for c in numeric_cols]
        ax.bar(range(len(values)), values, color="#4878a8")
        ax.set_xticks(range(len(values)))
        ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
        ax.set_ylabel("value")
    title = report.command if report.scenario is None else f"{report.command}: {report.scenario}"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path)
    plt.close(fig)


def _numeric_columns(report: Report) -> list[int]:
    cols = []
    for i in range(len(report.columns)):
        values = [row[i] for row in report.rows]
        if values and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
            for v in values
        ):
            cols.append(i)
    return cols


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        # JSON has no inf; the only non-finite value reports carry.
        return "inf" if math.isinf(value) else value
    raise ContractViolation(f"cell {value!r} is not serializable")
