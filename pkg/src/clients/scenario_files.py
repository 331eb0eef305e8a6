import json
import logging
from typing import Any, Dict, List, Type, TypeVar

from jsonpointer import JsonPointerException, resolve_pointer, set_pointer
from pydantic import BaseModel, ValidationError

from core.errors import InvalidScenarioError
from core.interfaces import ScenarioRepository
from core.models import Scenario, SweepSpec

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def format_validation_errors(error: ValidationError) -> List[str]:
    """Turns pydantic errors into 'field.path: message' violation strings."""
    return [f"{'.'.join(str(part) for part in detail['loc']) or '<root>'}: {detail['msg']}"
            for detail in error.errors()]


class ScenarioFileClient(ScenarioRepository):
    """Reads scenario and sweep files from disk; JSON and schema problems become InvalidScenarioError."""

    def load_scenario(self, path: str) -> Scenario:
        scenario = self._load(path, Scenario)
        logger.info(f"Loaded scenario '{scenario.name or path}' with {len(scenario.events)} event(s).")
        return scenario

    def load_sweep_spec(self, path: str) -> SweepSpec:
        return self._load(path, SweepSpec)

    def with_value(self, scenario: Scenario, pointer: str, value: float) -> Scenario:
        document: Dict[str, Any] = scenario.model_dump(mode="json", exclude_none=True)
        try:
            resolve_pointer(document, pointer)
            set_pointer(document, pointer, value)
        except JsonPointerException as e:
            raise InvalidScenarioError(f"Cannot set {pointer}: {e}", [f"{pointer}: {e}"]) from e
        return self._validate(document, Scenario, pointer)

    def _load(self, path: str, model: Type[ModelT]) -> ModelT:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as e:
            raise InvalidScenarioError(f"{path} is not valid JSON.", [f"<root>: {e}"]) from e
        return self._validate(document, model, path)

    @staticmethod
    def _validate(document: Any, model: Type[ModelT], source: str) -> ModelT:
        try:
            return model.model_validate(document)
        except ValidationError as e:
            violations = format_validation_errors(e)
            raise InvalidScenarioError(f"{source} does not match the {model.__name__} schema.", violations) from e
