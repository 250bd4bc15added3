"""
Report serialization

JSON is written with sorted keys and fixed indentation so identical runs give
identical bytes. CSV flattens the report into plot-ready rows with pandas.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional

import pandas as pd
from pydantic import BaseModel

from app.models.run_config import OutputFormat

logger = logging.getLogger(__name__)

# Report keys whose list values become one CSV row per element
ROW_KEYS = ("claims", "trace", "reports")


def to_data(report: BaseModel | dict) -> dict:
    if isinstance(report, BaseModel):
        return report.model_dump(mode="json")
    return report


def to_json(report: BaseModel | dict) -> str:
    return json.dumps(to_data(report), sort_keys=True, indent=2) + "\n"


def to_frame(report: BaseModel | dict) -> pd.DataFrame:
    data = to_data(report)
    body = data.get("result", data)
    for key in ROW_KEYS:
        rows = body.get(key) if isinstance(body, dict) else None
        if isinstance(rows, list) and rows:
            return pd.json_normalize(rows, sep=".")
    flat = {k: v for k, v in body.items() if not isinstance(v, list)}
    return pd.json_normalize([flat], sep=".")


def to_csv(report: BaseModel | dict) -> str:
    frame = to_frame(report)
    return frame.reindex(sorted(frame.columns), axis=1).to_csv(index=False, lineterminator="\n")


def render(report: BaseModel | dict, fmt: OutputFormat = OutputFormat.JSON) -> str:
    return to_csv(report) if fmt is OutputFormat.CSV else to_json(report)


def write_report(report: BaseModel | dict, path: Optional[str | Path], fmt: OutputFormat = OutputFormat.JSON) -> str:
    """Render the report and write it to ``path`` (parents created); returns the text"""
    text = render(report, fmt)
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
        logger.info("Report written to %s", target)
    return text


def summarize(data: dict[str, Any]) -> str:
    """One-line human summary for stderr"""
    passed = data.get("passed")
    name = data.get("command", "verify")
    return f"{name}: {'passed' if passed else 'FAILED'}"
