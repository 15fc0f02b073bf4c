import pandas as pd
from pathlib import Path
from typing import Dict, List
from io import StringIO
from openpyxl import load_workbook
from openpyxl.styles import Font, Alignment, PatternFill, Border, Side
from openpyxl.utils import get_column_letter
from openpyxl.worksheet.table import Table, TableStyleInfo
import logging

logger = logging.getLogger(__name__)


class ReportWriter:
    """Write verification tables as CSV text or styled Excel workbooks"""

    @staticmethod
    def apply_excel_styling(
        ws,
        header_row: int = 1,
        freeze_panes_cell: str = "A2",
        table_name: str = "ResultTable",
        table_style: str = "TableStyleMedium9",
        min_row_height: float = 18,
        header_row_height: float = 26,
    ):
        """
        Style a result sheet:
        - Frozen, emphasized header row
        - Bordered body with top alignment
        - Column widths fitted to content
        - Excel table with banded rows and auto-filter
        """
        ws.freeze_panes = freeze_panes_cell

        max_row = ws.max_row
        max_col = ws.max_column
        if max_row < header_row or max_col < 1:
            return

        header_fill = PatternFill("solid", fgColor="1F4E79")
        header_font = Font(bold=True, color="FFFFFF")
        header_alignment = Alignment(vertical="center", horizontal="center", wrap_text=True)
        body_alignment = Alignment(vertical="top", horizontal="left", wrap_text=False)
        thin = Side(style="thin", color="9E9E9E")
        border_all = Border(left=thin, right=thin, top=thin, bottom=thin)

        ws.row_dimensions[header_row].height = header_row_height
        for c in range(1, max_col + 1):
            cell = ws.cell(row=header_row, column=c)
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = header_alignment
            cell.border = border_all

        for r in range(header_row + 1, max_row + 1):
            ws.row_dimensions[r].height = max(ws.row_dimensions[r].height or 0, min_row_height)
            for c in range(1, max_col + 1):
                cell = ws.cell(row=r, column=c)
                cell.alignment = body_alignment
                cell.border = border_all

        for c in range(1, max_col + 1):
            max_len = max((len(str(ws.cell(row=r, column=c).value))
                           for r in range(1, max_row + 1) if ws.cell(row=r, column=c).value is not None),
                          default=0)
            ws.column_dimensions[get_column_letter(c)].width = min(60, max(10, int(max_len * 1.1) + 2))

        # A table needs at least one body row
        if max_row == header_row:
            return
        table_ref = f"A{header_row}:{get_column_letter(max_col)}{max_row}"
        tab = Table(displayName=table_name, ref=table_ref)
        tab.tableStyleInfo = TableStyleInfo(
            name=table_style,
            showFirstColumn=False,
            showLastColumn=False,
            showRowStripes=True,
            showColumnStripes=False,
        )
        ws.add_table(tab)

    @staticmethod
    def to_frame(rows: List[Dict]) -> pd.DataFrame:
        """Flatten list-valued cells so every table has scalar columns"""
        flat = [
            {key: " ".join(str(x) for x in value) if isinstance(value, (list, tuple)) else value
             for key, value in row.items()}
            for row in rows
        ]
        return pd.DataFrame(flat)

    @staticmethod
    def to_csv(rows: List[Dict]) -> str:
        buffer = StringIO()
        ReportWriter.to_frame(rows).to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    @staticmethod
    def to_text(rows: List[Dict]) -> str:
        if not rows:
            return ""
        return ReportWriter.to_frame(rows).to_string(index=False) + "\n"

    @staticmethod
    def write_workbook(sheets: Dict[str, List[Dict]], output_path: Path) -> None:
        """
        Write one styled sheet per table

        Args:
            sheets: Sheet names mapped to lists of row dicts
            output_path: Path of the .xlsx file
        """
        with pd.ExcelWriter(output_path, engine='openpyxl') as writer:
            for sheet_name, rows in sheets.items():
                ReportWriter.to_frame(rows).to_excel(writer, sheet_name=sheet_name[:31], index=False)

        wb = load_workbook(output_path)
        for idx, sheet_name in enumerate(sheets.keys(), 1):
            name = sheet_name[:31]
            if name in wb.sheetnames:
                ReportWriter.apply_excel_styling(wb[name], table_name=f"Table{idx}")
        wb.save(output_path)
        logger.info(f"Workbook written to {output_path} ({len(sheets)} sheets)")
