# Export the JSON schemas of the scenario, sweep and report files to docs/
import json
import logging
import os
import sys
from typing import Dict, Type

from dotenv import load_dotenv
from pydantic import BaseModel

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from core.config import Settings  # noqa: E402
from core.models import Scenario, ScoreReport, SweepSpec  # noqa: E402

logger = logging.getLogger(__name__)

SCHEMAS: Dict[str, Type[BaseModel]] = {
    "scenario.schema.json": Scenario,
    "sweep.schema.json": SweepSpec,
    "score_report.schema.json": ScoreReport,
}


class SchemaExporter:
    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    def export(self) -> Dict[str, str]:
        """Writes one schema file per model and returns the paths written."""
        os.makedirs(self.output_dir, exist_ok=True)
        written: Dict[str, str] = {}
        for filename, model in SCHEMAS.items():
            path = os.path.join(self.output_dir, filename)
            # report keys are the U/Cw/C aliases
            mode = "serialization" if model is ScoreReport else "validation"
            schema = model.model_json_schema(by_alias=True, mode=mode)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(schema, f, indent=2)
                f.write("\n")
            logger.info(f"Wrote {model.__name__} schema to {path}")
            written[model.__name__] = path
        return written


if __name__ == "__main__":
    load_dotenv()

    settings = Settings()
    settings.configure_logging(settings.log_level)

    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "../../docs")
    SchemaExporter(os.path.abspath(target)).export()
