import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


def _bits(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 4)


class EntityKind(str, Enum):
    PERSON = "person"
    MONUMENT = "monument"
    OBJECT = "object"
    ROLE = "role"


class FeatureKind(str, Enum):
    INTEGER = "integer"
    DIGITS = "digits"
    TOKEN = "token"


class ObserverIdentity(str, Enum):
    EGO = "ego"
    THIRD_PARTY = "third_party"


class Machine(str, Enum):
    """The two complexity machines: W generates situations, O describes them."""

    WORLD = "W"
    OBSERVATION = "O"


class AtomKind(str, Enum):
    DESIGNATE = "designate"
    INSTANTIATE = "instantiate"
    LOCATE = "locate"
    PLACE = "place"
    TIMESTAMP = "timestamp"
    HYPOTHESIS = "hypothesis"


class Opcode(str, Enum):
    EMIT_DIGIT = "EMIT_DIGIT"
    COPY = "COPY"
    REPEAT = "REPEAT"
    POW10 = "POW10"


class Location(BaseModel):
    """A place in a two-dimensional world, known up to a square cell of side resolution_a (km)."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    x: float = Field(description="East coordinate in km.")
    y: float = Field(description="North coordinate in km.")
    resolution_a: float = Field(gt=0, description="Side of the resolution cell in km.")
    prominence_rank: Optional[int] = Field(default=None, ge=1, description="Rank of the place among prominent landmarks.")
    reachability_penalty: float = Field(default=0.0, ge=0, description="Extra bits for places materially difficult to reach.")
    label: Optional[str] = Field(default=None, description="Human-readable name.")

    def distance_to(self, other: "Location") -> float:
        """Euclidean distance in km."""
        return float(np.hypot(self.x - other.x, self.y - other.y))

    def same_cell(self, other: "Location") -> bool:
        """True when other lies within this location's resolution cell."""
        return self.distance_to(other) < self.resolution_a

    def describe(self) -> str:
        return self.label or f"({self.x:g},{self.y:g})"


class TimePoint(BaseModel):
    """A date on the world's time axis, in hours, known up to resolution_tau."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    t: float = Field(description="Time in hours from the scenario epoch.")
    resolution_tau: float = Field(gt=0, description="Temporal resolution in hours.")


class Entity(BaseModel):
    """A person, monument, object or role that events may involve."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    id: str = Field(min_length=1, description="Unique identifier for the entity.")
    kind: EntityKind = Field(default=EntityKind.PERSON, description="What sort of entity this is.")
    known_to_world: bool = Field(default=True, description="Whether the world machine already has the entity (designation is free).")
    prominence_rank: Optional[int] = Field(default=None, ge=1, description="Rank in a prominence list; absent means looked up in celebrity lists.")
    home: Optional[Location] = Field(default=None, description="Where the entity lives.")


class FeatureValue(BaseModel):
    """A named attribute of an event with the size of its value domain."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    name: str = Field(min_length=1, description="Feature name, unique within its event.")
    kind: FeatureKind = Field(default=FeatureKind.TOKEN, description="How the value is coded.")
    value: Union[int, str] = Field(description="The observed value.")
    domain_size: int = Field(ge=1, description="Number of possible values.")
    likely_set_size: Optional[int] = Field(default=None, ge=1, description="Size of the set of values the world finds likely.")

    @property
    def text(self) -> str:
        return str(self.value)

    @property
    def is_numeral(self) -> bool:
        return self.kind in (FeatureKind.INTEGER, FeatureKind.DIGITS)


class EventDescription(BaseModel):
    """One event as the observer perceives it."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    id: str = Field(min_length=1, description="Unique identifier for the event.")
    kind: Optional[str] = Field(default=None, description="Event category, used to look up occurrence densities.")
    participants: List[str] = Field(default_factory=list, description="Ids of the entities involved; 'ego' is the observer.")
    features: List[FeatureValue] = Field(default_factory=list, description="Observed attributes.")
    location: Optional[Location] = Field(default=None, description="Where the event took place.")
    time: Optional[TimePoint] = Field(default=None, description="When the event took place.")
    occurrence_density: Optional[float] = Field(default=None, gt=0, description="Events of this kind per km^2 over the time window.")


class InstructionCostModel(BaseModel):
    """Costs of the digit-program instruction set shared by the codecs and the oracle."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    opcode_cost: float = Field(default=2.0, gt=0, description="Bits to select one of the four opcodes.")
    repeat_max: int = Field(default=16, ge=1, description="Largest REPEAT count.")
    exponent_max: int = Field(default=8, ge=1, description="Largest POW10 exponent.")
    max_length: int = Field(default=16, ge=1, description="Longest digit string the codec accepts.")

    @property
    def digit_cost(self) -> float:
        return math.log2(10)

    @property
    def repeat_count_cost(self) -> float:
        return math.log2(self.repeat_max)

    @property
    def exponent_cost(self) -> float:
        return math.log2(self.exponent_max)


class World(BaseModel):
    """What the world machine knows: area, time window, densities, notable entities."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    area_s: float = Field(gt=0, description="Area of the relevant world in km^2.")
    time_window_t: float = Field(gt=0, description="Relevant time window in hours.")
    population_density_rho: float = Field(gt=0, description="People per km^2.")
    event_densities: Dict[str, float] = Field(default_factory=dict, description="Occurrence density by event kind.")
    celebrity_lists: Dict[str, List[str]] = Field(default_factory=dict, description="Ordered prominence lists of entity ids.")
    entities: List[Entity] = Field(default_factory=list, description="Entities the scenario refers to.")
    cost_model: InstructionCostModel = Field(default_factory=InstructionCostModel, description="Digit-program instruction costs.")


class Observer(BaseModel):
    """Whoever finds the situation unexpected."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    identity: ObserverIdentity = Field(default=ObserverIdentity.EGO, description="Ego or a third party.")
    entity: Optional[str] = Field(default=None, description="Entity id of a third-party observer.")
    home: Location = Field(description="The observer's home, the origin of relative coding.")
    ego_home: Optional[Location] = Field(default=None, description="Ego's home, used to designate a third party by distance.")


class CausalHypothesis(BaseModel):
    """A candidate cause the world machine may use to generate several events at once."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    id: str = Field(min_length=1, description="Unique identifier for the hypothesis.")
    credibility_cost: float = Field(ge=0, description="Bits the world needs to bring the cause about.")
    explains: List[str] = Field(description="Ids of the events the cause generates.")
    residual_costs: Dict[str, float] = Field(default_factory=dict, description="Bits still needed per explained event.")


class Scenario(BaseModel):
    """Everything needed to score one situation."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    name: Optional[str] = Field(default=None, description="Short scenario name.")
    description: Optional[str] = Field(default=None, description="Free-text description.")
    world: World
    events: List[EventDescription] = Field(default_factory=list)
    observer: Observer
    hypotheses: List[CausalHypothesis] = Field(default_factory=list)


class DescriptionAtom(BaseModel):
    """One primitive step of a computation that produces the situation."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    index: int = Field(ge=0, description="Position in the scenario's canonical atom list.")
    kind: AtomKind
    source_event: Optional[str] = Field(default=None, description="Event the atom describes; absent for observer and hypothesis atoms.")
    entity_id: Optional[str] = None
    feature: Optional[FeatureValue] = None
    location: Optional[Location] = None
    time: Optional[TimePoint] = None
    hypothesis_id: Optional[str] = None

    @property
    def label(self) -> str:
        event = f"{self.source_event}." if self.source_event else ""
        if self.kind == AtomKind.DESIGNATE:
            return f"designate({event}{self.entity_id})" if self.source_event else f"observer({self.entity_id})"
        if self.kind == AtomKind.INSTANTIATE:
            return f"instantiate({event}{self.feature.name}={self.feature.text})"
        if self.kind == AtomKind.LOCATE:
            return f"locate({event}{self.location.describe()})"
        if self.kind == AtomKind.PLACE:
            return f"place({event}{self.entity_id}@{self.location.describe()})"
        if self.kind == AtomKind.TIMESTAMP:
            return f"timestamp({event}t={self.time.t:g})"
        return f"hypothesis({self.hypothesis_id})"


class ComputationSequence(BaseModel):
    """An ordering of atoms; each atom is coded given the atoms before it."""

    model_config = ConfigDict(frozen=True)

    atoms: List[DescriptionAtom] = Field(default_factory=list)

    @property
    def indices(self) -> List[int]:
        return [atom.index for atom in self.atoms]

    @property
    def labels(self) -> List[str]:
        return [atom.label for atom in self.atoms]


class AtomCost(BaseModel):
    """The cost one machine charged for one atom, and the rule that fired."""

    model_config = ConfigDict(frozen=True)

    index: int
    atom: str
    machine: Machine
    bits: float
    rule: str
    detail: Optional[str] = None

    @field_serializer("bits")
    def _round_bits(self, value: float) -> float:
        return _bits(value)


class CostBreakdown(BaseModel):
    """Per-atom costs along one computation sequence."""

    model_config = ConfigDict(frozen=True)

    machine: Machine
    per_atom: List[AtomCost] = Field(default_factory=list)
    total: float = 0.0

    @field_serializer("total")
    def _round_total(self, value: float) -> float:
        return _bits(value)

    def rule_for(self, index: int) -> Optional[str]:
        return next((cost.rule for cost in self.per_atom if cost.index == index), None)


class MinCostResult(BaseModel):
    """The cheapest computation sequence one machine found for a scenario."""

    model_config = ConfigDict(frozen=True)

    machine: Machine
    total: float
    sequence: ComputationSequence
    breakdown: CostBreakdown
    hypotheses_used: List[str] = Field(default_factory=list)


class ScoreReport(BaseModel):
    """Unexpectedness of a scenario with the evidence behind it."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    u_bits: float = Field(alias="U", description="Unexpectedness: W complexity minus O complexity.")
    cw_bits: float = Field(alias="Cw", description="Generation complexity on the world machine.")
    c_bits: float = Field(alias="C", description="Description complexity on the observation machine.")
    cognitive_probability: Optional[float] = Field(default=None, description="2^-U, absent when U < 0.")
    hypotheses_used: List[str] = Field(default_factory=list, description="Causal hypotheses the W optimum relies on.")
    w_breakdown: CostBreakdown
    o_breakdown: CostBreakdown
    w_sequence: List[str] = Field(default_factory=list)
    o_sequence: List[str] = Field(default_factory=list)
    sequence_bound: Optional[float] = Field(default=None, description="W optimum minus O cost of the first-then-second event order.")
    observer_cost: Optional[float] = Field(default=None, description="Bits needed to designate the observer.")

    @field_serializer("u_bits", "cw_bits", "c_bits", "sequence_bound", "observer_cost")
    def _round_bits(self, value: Optional[float]) -> Optional[float]:
        return _bits(value)

    @field_serializer("cognitive_probability")
    def _round_probability(self, value: Optional[float]) -> Optional[float]:
        return None if value is None else float(f"{value:.6g}")


class ConditionalReport(BaseModel):
    """Unexpectedness of a split description: U(D1), U(D2|D1) and U(D1*D2)."""

    model_config = ConfigDict(frozen=True)

    first_events: List[str]
    u_first: float
    u_second_given_first: float
    u_joint: float

    @property
    def split_total(self) -> float:
        return self.u_first + self.u_second_given_first


class Instruction(BaseModel):
    """One instruction of a digit program."""

    model_config = ConfigDict(frozen=True)

    opcode: Opcode
    operand: Optional[int] = None

    def __str__(self) -> str:
        return self.opcode.value if self.operand is None else f"{self.opcode.value}({self.operand})"


class DigitProgram(BaseModel):
    """A digit program together with its cost and the number of digits it emits verbatim."""

    model_config = ConfigDict(frozen=True)

    instructions: List[Instruction]
    cost: float
    emitted_digits: int

    def __str__(self) -> str:
        return " ".join(str(instruction) for instruction in self.instructions)


class GeometricRange(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    start: float = Field(gt=0)
    factor: float = Field(gt=0)
    count: int = Field(ge=1, le=10_000)


class SweepSpec(BaseModel):
    """A one-parameter sweep over a scenario field addressed by a JSON pointer."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    parameter: Literal["distance_km", "time_h", "rank", "credibility_bits"] = Field(description="What the swept field means.")
    scenario: str = Field(description="Scenario file, relative to the spec file.")
    pointer: str = Field(description="JSON pointer of the field receiving each value.")
    values: Optional[List[float]] = Field(default=None, max_length=10_000)
    geometric: Optional[GeometricRange] = None

    @model_validator(mode="after")
    def _check_values(self) -> "SweepSpec":
        if (self.values is None) == (self.geometric is None):
            raise ValueError("exactly one of 'values' or 'geometric' is required")
        if self.values is not None and not all(math.isfinite(v) and v > 0 for v in self.values):
            raise ValueError("sweep values must be strictly positive and finite")
        return self

    def resolved_values(self) -> List[float]:
        if self.values is not None:
            return list(self.values)
        steps = np.arange(self.geometric.count, dtype=float)
        return [float(v) for v in self.geometric.start * np.power(self.geometric.factor, steps)]


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    param: float
    u_bits: float
    p: Optional[float] = None


class OracleMismatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    target: str
    codec_bits: float
    oracle_bits: float


class OracleCheckResult(BaseModel):
    """Outcome of comparing the digit codec with exhaustive search on every short string."""

    model_config = ConfigDict(frozen=True)

    max_len: int
    opcode_cost: float
    cases: int
    mismatches: List[OracleMismatch] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches
