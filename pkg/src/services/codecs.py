"""Description-length codecs, in bits, for the quantities a situation is built from.

Numerals are coded with a small digit-program language (see ``services.oracle``
for its interpreter); positions, dates, entities and categorical values have
closed-form codes.
"""
import math
from typing import List, Optional, Tuple

from core.errors import (
    DensityTooHighError,
    InvalidDigitError,
    MissingHomeError,
    OutOfRangeError,
    ResolutionExceedsAreaError,
    ResolutionExceedsWindowError,
    TooLongError,
)
from core.models import (
    DigitProgram,
    Entity,
    FeatureValue,
    Instruction,
    InstructionCostModel,
    Location,
    Machine,
    Opcode,
    TimePoint,
    World,
)

EPSILON = 1e-12
INTEGER_MAX = 10 ** 16


def bits_for_integer_choice(n: int) -> float:
    """Bits to single out one of n equally likely options."""
    if n < 1:
        raise OutOfRangeError(f"Cannot choose among {n} options.")
    return math.log2(n)


def rank_complexity(rank: int) -> float:
    """Bits to designate the entity at 1-based position rank in a prominence list."""
    if rank < 1:
        raise OutOfRangeError(f"Prominence rank must be >= 1, got {rank}.")
    return math.log2(rank + 1)


def check_digit_string(s: str, model: InstructionCostModel) -> None:
    """Raises unless s is a non-empty string of decimal digits within the model's length limit."""
    if not s or not all(ch in "0123456789" for ch in s):
        raise InvalidDigitError(f"Not a digit string: {s!r}")
    if len(s) > model.max_length:
        raise TooLongError(f"Digit string of length {len(s)} exceeds {model.max_length}.")


def _run(s: str, start: int, digit: str) -> int:
    """Length of the run of `digit` in s starting at start."""
    end = start
    while end < len(s) and s[end] == digit:
        end += 1
    return end - start


def _best_program(s: str, model: InstructionCostModel, per_digit: bool) -> DigitProgram:
    # best[i]: cheapest program whose output is s[:i]. With per_digit set, every
    # produced digit (not only emitted ones) also pays for its own value.
    check_digit_string(s, model)
    n = len(s)
    d = model.digit_cost
    extra = d if per_digit else 0.0
    best: List[float] = [math.inf] * (n + 1)
    back: List[Optional[Tuple[int, Instruction]]] = [None] * (n + 1)
    best[0] = 0.0

    def relax(i: int, j: int, cost: float, instruction: Instruction) -> None:
        if best[i] + cost < best[j] - EPSILON:
            best[j] = best[i] + cost
            back[j] = (i, instruction)

    for i in range(n):
        if best[i] == math.inf:
            continue
        relax(i, i + 1, model.opcode_cost + d, Instruction(opcode=Opcode.EMIT_DIGIT, operand=int(s[i])))
        if i == 0:
            continue
        run = _run(s, i, s[i - 1])
        if run >= 1:
            relax(i, i + 1, model.opcode_cost + extra, Instruction(opcode=Opcode.COPY))
        for k in range(1, min(run, model.repeat_max) + 1):
            relax(i, i + k, model.opcode_cost + model.repeat_count_cost + k * extra,
                  Instruction(opcode=Opcode.REPEAT, operand=k))
        zeros = _run(s, i, "0")
        for e in range(1, min(zeros, model.exponent_max) + 1):
            relax(i, i + e, model.opcode_cost + model.exponent_cost + e * extra,
                  Instruction(opcode=Opcode.POW10, operand=e))

    instructions: List[Instruction] = []
    j = n
    while j > 0:
        i, instruction = back[j]
        instructions.append(instruction)
        j = i
    instructions.reverse()
    emitted = sum(1 for instruction in instructions if instruction.opcode == Opcode.EMIT_DIGIT)
    return DigitProgram(instructions=instructions, cost=best[n], emitted_digits=emitted)


def digit_string_program(s: str, model: InstructionCostModel) -> DigitProgram:
    """Cheapest digit program that outputs s."""
    return _best_program(s, model, per_digit=False)


def digit_string_complexity(s: str, model: InstructionCostModel) -> float:
    """Bits of the cheapest digit program that outputs s."""
    return digit_string_program(s, model).cost


def world_digit_string_program(s: str, model: InstructionCostModel) -> DigitProgram:
    """Cheapest program when every output digit is drawn independently, as the world machine does."""
    return _best_program(s, model, per_digit=True)


def world_digit_string_complexity(s: str, model: InstructionCostModel) -> float:
    return world_digit_string_program(s, model).cost


def integer_complexity(n: int, model: InstructionCostModel) -> float:
    """Bits to describe an integer in 1..10^16 through its decimal expansion."""
    if not 1 <= n <= INTEGER_MAX:
        raise OutOfRangeError(f"Integer must be between 1 and {INTEGER_MAX}, got {n}.")
    text = str(n)
    if len(text) > model.max_length:
        # 10^16 is one digit longer than the default string limit
        model = model.model_copy(update={"max_length": len(text)})
    return digit_string_complexity(text, model)


def spatial_absolute(loc: Location, world: World, use_prominence: bool = True) -> float:
    """Bits to pick a resolution cell out of the world area, or a landmark by prominence."""
    if loc.resolution_a ** 2 > world.area_s:
        raise ResolutionExceedsAreaError(
            f"Resolution cell {loc.resolution_a} km exceeds world area {world.area_s} km^2."
        )
    if use_prominence and loc.prominence_rank is not None:
        return rank_complexity(loc.prominence_rank) + loc.reachability_penalty
    return math.log2(world.area_s / loc.resolution_a ** 2) + loc.reachability_penalty


def spatial_relative(b: Location, origin: Location) -> float:
    """Bits to code b once origin is known: a disc of radius d(origin, b) in cells of b."""
    distance = origin.distance_to(b)
    if distance < b.resolution_a:
        return 0.0
    return math.log2(math.pi * distance ** 2 / b.resolution_a ** 2)


def temporal_absolute(tp: TimePoint, world: World) -> float:
    if tp.resolution_tau > world.time_window_t:
        raise ResolutionExceedsWindowError(
            f"Resolution {tp.resolution_tau} h exceeds time window {world.time_window_t} h."
        )
    return math.log2(world.time_window_t / tp.resolution_tau)


def temporal_relative(t2: TimePoint, t1: TimePoint) -> float:
    """Bits to code t2 once t1 is known: an interval of ±Δ in steps of t2's resolution."""
    delta = abs(t2.t - t1.t)
    if delta < t2.resolution_tau:
        return 0.0
    return math.log2(2 * delta / t2.resolution_tau)


def density_localization(density: float, resolution_a: float) -> float:
    """Bits to pick one of the 1/(a^2 D) cells an event of density D could occupy."""
    if density <= 0:
        raise OutOfRangeError(f"Density must be positive, got {density}.")
    mass = resolution_a ** 2 * density
    if mass > 1:
        raise DensityTooHighError(f"Density {density} per km^2 puts {mass:.3g} events in one cell.")
    return math.log2(1 / mass)


def world_location_cost(loc: Location, world: World, density: Optional[float] = None) -> float:
    """Bits the world machine needs to bring something about at loc; prominence does not help it."""
    if density is not None:
        return density_localization(density, loc.resolution_a) + loc.reachability_penalty
    return spatial_absolute(loc, world, use_prominence=False)


def person_by_distance_rank(person: Entity, place: Location, world: World) -> float:
    """Bits to designate person as 'the n-th closest person' to place, from their home."""
    if person.home is None:
        raise MissingHomeError(f"Entity {person.id} has no home location.")
    distance = person.home.distance_to(place)
    candidates = world.population_density_rho * math.pi * distance ** 2
    return math.log2(candidates) if candidates > 1 else 0.0


def feature_instantiation(feature: FeatureValue, machine: Machine, model: InstructionCostModel) -> float:
    """Bits for one feature value on the given machine."""
    if feature.is_numeral:
        if machine == Machine.WORLD:
            return world_digit_string_complexity(feature.text, model)
        return digit_string_complexity(feature.text, model)
    if machine == Machine.WORLD and feature.likely_set_size is not None:
        return bits_for_integer_choice(feature.likely_set_size)
    return bits_for_integer_choice(feature.domain_size)
