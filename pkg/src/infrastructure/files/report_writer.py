"""CSV and markdown renderings of evaluation rows."""

import math
from pathlib import Path
from typing import Final, Optional, Sequence

import pandas as pd

from src.core.enums import AttackKind
from src.core.models import ReportRow, format_parameter
from src.infrastructure.files.netpbm import PathLike
from src.infrastructure.logging.logger import setup_logger
from src.services.report_interfaces import AbstractReportWriter

logger = setup_logger(__name__)

CSV_COLUMNS: Final = (
    "attack",
    "parameter",
    "authenticated",
    "similarity_pct",
    "psnr_db",
    "seed",
)
ERROR_MARKER: Final[str] = "ERROR"
MISSING_CELL: Final[str] = "-"

PARAMETER_LABELS: Final[dict[AttackKind, str]] = {
    AttackKind.ZEROING: "Size (pixels)",
    AttackKind.ROTATION: "Angle",
    AttackKind.JPEG: "Ratio",
    AttackKind.GAUSSIAN: "Standard dev.",
}
TITLES: Final[dict[AttackKind, str]] = {
    AttackKind.ZEROING: "Zeroing attack",
    AttackKind.ROTATION: "Rotation attack",
    AttackKind.JPEG: "JPEG compression",
    AttackKind.GAUSSIAN: "Gaussian noise",
}


def _format_psnr(value: Optional[float]) -> str:
    if value is None:
        return ""
    return "inf" if math.isinf(value) else f"{value:.4f}"


def rows_to_frame(rows: Sequence[ReportRow]) -> pd.DataFrame:
    """One preformatted string cell per CSV field, in row order."""
    records = [
        {
            "attack": row.attack.value,
            "parameter": format_parameter(row.parameter),
            "authenticated": "true" if row.authenticated else "false",
            "similarity_pct": (
                ERROR_MARKER
                if row.similarity_pct is None
                else f"{row.similarity_pct:.4f}"
            ),
            "psnr_db": _format_psnr(row.psnr_db),
            "seed": "" if row.seed is None else str(row.seed),
        }
        for row in rows
    ]
    return pd.DataFrame.from_records(records, columns=list(CSV_COLUMNS))


class CsvReportWriter(AbstractReportWriter):
    def __init__(self, path: PathLike):
        self.path = Path(path)

    def write(self, rows: Sequence[ReportRow]) -> None:
        rows_to_frame(rows).to_csv(self.path, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(rows)} rows to {self.path}")


def _similarity_cell(values: pd.Series) -> str:
    valid = values.dropna()
    if valid.empty:
        return ERROR_MARKER
    return f"{valid.mean():.2f}%"


def render_markdown(rows: Sequence[ReportRow]) -> str:
    """Paired unauthenticated/authenticated tables, one per attack family.

    Repeated trials of a setting are averaged; failed rows are left out of
    the average.
    """
    if not rows:
        return ""
    frame = pd.DataFrame(
        {
            "attack": [row.attack for row in rows],
            "parameter": [row.parameter for row in rows],
            "authenticated": [row.authenticated for row in rows],
            "similarity": [row.similarity_pct for row in rows],
        }
    )
    frame["similarity"] = frame["similarity"].astype("float64")
    cells = frame.groupby(
        ["attack", "parameter", "authenticated"], sort=False
    )["similarity"].agg(_similarity_cell)

    sections: list[str] = []
    for kind in frame["attack"].drop_duplicates():
        label = PARAMETER_LABELS[kind]
        lines = [
            f"### {TITLES[kind]}",
            "",
            "| UNAUTHENTICATION | | AUTHENTICATION | |",
            "|---|---|---|---|",
            f"| {label} | Similarity | {label} | Similarity |",
        ]
        parameters = frame.loc[frame["attack"] == kind, "parameter"]
        for parameter in parameters.drop_duplicates():
            shown = format_parameter(parameter)
            plain = cells.get((kind, parameter, False), MISSING_CELL)
            authed = cells.get((kind, parameter, True), MISSING_CELL)
            lines.append(f"| {shown} | {plain} | {shown} | {authed} |")
        sections.append("\n".join(lines))
    return "\n\n".join(sections) + "\n"


class MarkdownReportWriter(AbstractReportWriter):
    def __init__(self, path: PathLike):
        self.path = Path(path)

    def write(self, rows: Sequence[ReportRow]) -> None:
        self.path.write_text(render_markdown(rows), encoding="utf-8")
        logger.info(f"Wrote markdown report to {self.path}")
