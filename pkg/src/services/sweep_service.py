import csv
import logging
import os
from typing import List, TextIO

from core.interfaces import ScenarioRepository
from core.models import SweepRow, SweepSpec
from services.unexpectedness_service import UnexpectednessService

logger = logging.getLogger(__name__)

CSV_HEADER = ["param", "U_bits", "p"]


class SweepService:
    """Scores one scenario over a range of values of a single field."""

    def __init__(self, repository: ScenarioRepository, unexpectedness_service: UnexpectednessService):
        self.repository = repository
        self.unexpectedness_service = unexpectedness_service

    def run(self, spec: SweepSpec, spec_path: str) -> List[SweepRow]:
        """
        Evaluates every value of the sweep in the order listed.

        Args:
            spec: The sweep specification
            spec_path: Where the spec was read from; its scenario path is relative to it

        Returns:
            One row per value
        """
        scenario_path = os.path.join(os.path.dirname(os.path.abspath(spec_path)), spec.scenario)
        scenario = self.repository.load_scenario(scenario_path)
        rows: List[SweepRow] = []
        for value in spec.resolved_values():
            variant = self.repository.with_value(scenario, spec.pointer, value)
            report = self.unexpectedness_service.unexpectedness(variant)
            rows.append(SweepRow(param=value, u_bits=report.u_bits, p=report.cognitive_probability))
            logger.info(f"{spec.parameter}={value:g}: U={report.u_bits:.4f} bits")
        return rows

    @staticmethod
    def write_csv(rows: List[SweepRow], stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([f"{row.param:g}", f"{row.u_bits:.4f}", "" if row.p is None else f"{row.p:.6g}"])
