import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from constants import CSV_DIGITS

log = logging.getLogger(__name__)

FLOAT_FORMAT = f"%.{CSV_DIGITS}g"


def _clean(value):
    """Números com 12 algarismos significativos; None/NaN viram null."""
    if value is None:
        return None
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(FLOAT_FORMAT % value)
    return value


def format_table(records: List[Dict[str, Any]], columns: Sequence[str], fmt: str = "csv") -> str:
    """
    Tabela em texto. CSV: cabeçalho, colunas na ordem dada, '.' decimal,
    12 algarismos significativos, campo vazio para valores indefinidos.
    """
    if fmt == "json":
        return json.dumps([{c: _clean(r.get(c)) for c in columns} for r in records], indent=2) + "\n"
    df = pd.DataFrame.from_records(records, columns=list(columns))
    buf = io.StringIO()
    df.to_csv(buf, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return buf.getvalue()


def write_outputs(output: Optional[str], rows: List[Dict[str, Any]], columns: Sequence[str],
                  fmt: str = "csv", summary: Optional[List[Dict[str, Any]]] = None,
                  summary_columns: Optional[Sequence[str]] = None) -> Optional[Path]:
    """
    Salva (ou imprime, se output for None) a tabela principal e o bloco de resumo.
    CSV em arquivo: o resumo vai para <nome>.summary.csv ao lado.
    JSON: um único objeto {"rows": [...], "summary": [...]}.
    """
    if fmt == "json":
        payload = {"rows": json.loads(format_table(rows, columns, "json"))}
        if summary is not None:
            payload["summary"] = json.loads(format_table(summary, summary_columns, "json"))
        text = json.dumps(payload, indent=2) + "\n"
        extra = None
    else:
        text = format_table(rows, columns, "csv")
        extra = format_table(summary, summary_columns, "csv") if summary is not None else None

    if output is None:
        print(text, end="")
        if extra is not None:
            print()
            print(extra, end="")
        return None

    out_path = Path(output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text, encoding="utf-8")
    if extra is not None:
        summary_path = out_path.with_suffix(".summary.csv")
        summary_path.write_text(extra, encoding="utf-8")
        log.info("Resumo salvo em %s", summary_path)

    log.info("✅ Resultados salvos em %s", out_path)
    return out_path
