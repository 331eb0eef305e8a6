from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, FrozenSet, Hashable, Optional, Sequence, Tuple

from core.models import DescriptionAtom, DigitProgram, InstructionCostModel, Machine, Scenario, SweepSpec

if TYPE_CHECKING:
    from services.event_model import ResolvedScenario


class CostMachine(ABC):
    """Interface for a machine that charges bits for each atom given the atoms computed before it."""

    machine: Machine

    @abstractmethod
    def atom_cost(self, atom: DescriptionAtom, context: Sequence[DescriptionAtom],
                  resolved: "ResolvedScenario") -> Tuple[float, str]:
        """
        Returns the conditional cost of an atom and the name of the rule that produced it.

        Args:
            atom: The atom to code
            context: The atoms already computed, in any order
            resolved: The scenario the atoms belong to

        Returns:
            A (bits, rule) pair
        """
        pass

    @abstractmethod
    def context_keys(self, atom: DescriptionAtom, resolved: "ResolvedScenario",
                     explained_events: FrozenSet[str]) -> FrozenSet[Hashable]:
        """
        Returns the keys through which this atom's cost can depend on, or influence, other atoms.

        Two atoms that share no key never change each other's cost; the
        optimizer relies on this to minimise independent groups separately.
        """
        pass


class ProgramSearch(ABC):
    """Interface for finding the cheapest digit program for a target string."""

    @abstractmethod
    def min_program(self, target: str, model: InstructionCostModel,
                    budget: Optional[float] = None) -> DigitProgram:
        """Returns the cheapest program whose output is target."""
        pass


class ScenarioRepository(ABC):
    """Interface for reading scenarios and sweep specifications."""

    @abstractmethod
    def load_scenario(self, path: str) -> Scenario:
        """Loads and parses a scenario file."""
        pass

    @abstractmethod
    def load_sweep_spec(self, path: str) -> SweepSpec:
        """Loads and parses a sweep specification file."""
        pass

    @abstractmethod
    def with_value(self, scenario: Scenario, pointer: str, value: float) -> Scenario:
        """Returns a copy of the scenario with the field at a JSON pointer set to value."""
        pass
