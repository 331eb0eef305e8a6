import json
import os

import pytest

from conftest import ROOT
from utilities.export_schemas import SchemaExporter


def test_export_writes_all_schemas(tmp_path):
    written = SchemaExporter(str(tmp_path)).export()
    assert set(written) == {"Scenario", "SweepSpec", "ScoreReport"}
    with open(written["ScoreReport"], encoding="utf-8") as f:
        report = json.load(f)
    assert {"U", "Cw", "C"} <= set(report["properties"])
    with open(written["Scenario"], encoding="utf-8") as f:
        scenario = json.load(f)
    assert "world" in scenario["required"]


def _shape(schema):
    """Property names and required fields of a schema and of each of its definitions."""
    parts = {"<root>": schema, **schema.get("$defs", {})}
    return {name: (set(part.get("properties", {})), set(part.get("required", []))) for name, part in parts.items()}


@pytest.mark.parametrize("filename", ["scenario.schema.json", "sweep.schema.json", "score_report.schema.json"])
def test_committed_schemas_match_the_models(tmp_path, filename):
    SchemaExporter(str(tmp_path)).export()
    with open(tmp_path / filename, encoding="utf-8") as f:
        generated = json.load(f)
    with open(os.path.join(ROOT, "docs", filename), encoding="utf-8") as f:
        committed = json.load(f)
    assert committed["title"] == generated["title"]
    assert _shape(committed) == _shape(generated)
