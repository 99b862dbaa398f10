from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    text = str(value)
    return text[:60] + ("..." if len(text) > 60 else "")


def render_pdf(
    path: Union[str, Path],
    title: str,
    summary: List[Sequence[Any]],
    columns: List[str],
    rows: List[Dict[str, Any]],
) -> Path:
    """
    Render a report as a PDF: a key/value summary block and one table.

    Args:
        path: output file
        title: page heading
        summary: (label, value) pairs shown above the table
        columns: record keys, in column order
        rows: records
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    doc = SimpleDocTemplate(
        str(target),
        pagesize=letter,
        rightMargin=0.6 * inch,
        leftMargin=0.6 * inch,
        topMargin=0.75 * inch,
        bottomMargin=0.75 * inch,
    )

    styles = getSampleStyleSheet()
    header_style = ParagraphStyle(
        "ReportHeader",
        parent=styles["Heading1"],
        fontSize=18,
        spaceAfter=12,
        textColor=colors.HexColor("#1e293b"),
        alignment=TA_CENTER,
        fontName="Helvetica-Bold",
    )
    body_style = ParagraphStyle(
        "ReportBody",
        parent=styles["Normal"],
        fontSize=9,
        spaceAfter=2,
        textColor=colors.HexColor("#374151"),
        leading=12,
    )

    story = [Paragraph(title.replace("<", "&lt;").replace(">", "&gt;"), header_style)]
    for label, value in summary:
        text = f"<b>{label}</b>: {_cell(value)}".replace("<=", "&lt;=")
        story.append(Paragraph(text, body_style))
    story.append(Spacer(1, 14))

    if rows:
        table_data = [columns] + [[_cell(row.get(col, "")) for col in columns] for row in rows]
        table = Table(table_data, repeatRows=1)
        table.setStyle(
            TableStyle(
                [
                    ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#0ea5e9")),
                    ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
                    ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
                    ("FONTSIZE", (0, 0), (-1, -1), 8),
                    ("ALIGN", (0, 0), (-1, -1), "RIGHT"),
                    ("GRID", (0, 0), (-1, -1), 0.5, colors.HexColor("#e2e8f0")),
                    ("ROWBACKGROUNDS", (0, 1), (-1, -1), [colors.HexColor("#f8fafc"), colors.white]),
                ]
            )
        )
        story.append(table)

    doc.build(story)
    return target
