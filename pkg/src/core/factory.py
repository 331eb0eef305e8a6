import logging
from typing import Any, Dict

from core.config import Settings
from core.interfaces import ScenarioRepository
from clients.scenario_files import ScenarioFileClient
from services.machines import ObservationMachine, SequenceOptimizer, WorldMachine
from services.oracle import ProgramOracle
from services.sweep_service import SweepService
from services.unexpectedness_service import UnexpectednessService

logger = logging.getLogger(__name__)


class ServiceFactory:
    """Factory class for creating and managing service instances."""

    def __init__(self, settings: Settings):
        """Initializes the ServiceFactory with application settings."""
        self.settings = settings
        self._instances: Dict[str, Any] = {}

    def get_scenario_repository(self) -> ScenarioRepository:
        """Returns a ScenarioRepository implementation."""
        if "scenario_repository" not in self._instances:
            self._instances["scenario_repository"] = ScenarioFileClient()
        return self._instances["scenario_repository"]

    def get_world_machine(self) -> WorldMachine:
        if "world_machine" not in self._instances:
            self._instances["world_machine"] = WorldMachine()
        return self._instances["world_machine"]

    def get_observation_machine(self) -> ObservationMachine:
        if "observation_machine" not in self._instances:
            self._instances["observation_machine"] = ObservationMachine()
        return self._instances["observation_machine"]

    def get_sequence_optimizer(self) -> SequenceOptimizer:
        """Returns the optimizer bounded by the configured component and hypothesis limits."""
        if "sequence_optimizer" not in self._instances:
            self._instances["sequence_optimizer"] = SequenceOptimizer(
                max_component_atoms=self.settings.max_component_atoms,
                max_hypotheses=self.settings.max_hypotheses,
            )
        return self._instances["sequence_optimizer"]

    def get_unexpectedness_service(self) -> UnexpectednessService:
        """Returns an UnexpectednessService instance."""
        if "unexpectedness_service" not in self._instances:
            self._instances["unexpectedness_service"] = UnexpectednessService(
                self.get_sequence_optimizer(),
                self.get_world_machine(),
                self.get_observation_machine(),
                max_sequence_atoms=self.settings.max_sequence_atoms,
            )
        return self._instances["unexpectedness_service"]

    def get_sweep_service(self) -> SweepService:
        """Returns a SweepService instance."""
        if "sweep_service" not in self._instances:
            self._instances["sweep_service"] = SweepService(
                self.get_scenario_repository(),
                self.get_unexpectedness_service(),
            )
        return self._instances["sweep_service"]

    def get_program_oracle(self) -> ProgramOracle:
        """Returns a ProgramOracle configured with the default search budget."""
        if "program_oracle" not in self._instances:
            self._instances["program_oracle"] = ProgramOracle(
                budget_bits=self.settings.oracle_budget_bits,
                max_length=self.settings.oracle_max_length,
            )
        return self._instances["program_oracle"]

    def close_all(self) -> None:
        """Drops all cached services."""
        self._instances = {}
        logger.debug("Service instances released.")
