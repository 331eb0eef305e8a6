import heapq
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

from tqdm import tqdm

from core.errors import CopyWithoutContextError, OutOfRangeError, ProgramNotFoundError, TooLongError
from core.interfaces import ProgramSearch
from core.models import (
    DigitProgram,
    Instruction,
    InstructionCostModel,
    OracleCheckResult,
    OracleMismatch,
    Opcode,
)
from services.codecs import check_digit_string, digit_string_complexity

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
_OPCODE_ORDER = {Opcode.EMIT_DIGIT: 0, Opcode.COPY: 1, Opcode.REPEAT: 2, Opcode.POW10: 3}


def instruction_cost(instruction: Instruction, model: InstructionCostModel) -> float:
    """Bits one instruction costs under the cost model."""
    if instruction.opcode == Opcode.EMIT_DIGIT:
        return model.opcode_cost + model.digit_cost
    if instruction.opcode == Opcode.COPY:
        return model.opcode_cost
    if instruction.opcode == Opcode.REPEAT:
        return model.opcode_cost + model.repeat_count_cost
    return model.opcode_cost + model.exponent_cost


def program_cost(program: Sequence[Instruction], model: InstructionCostModel) -> float:
    return sum(instruction_cost(instruction, model) for instruction in program)


def _apply(output: str, instruction: Instruction, model: InstructionCostModel) -> str:
    opcode, operand = instruction.opcode, instruction.operand
    if opcode == Opcode.EMIT_DIGIT:
        if operand is None or not 0 <= operand <= 9:
            raise OutOfRangeError(f"EMIT_DIGIT operand must be a digit, got {operand}.")
        return output + str(operand)
    if not output:
        raise CopyWithoutContextError(f"{opcode.value} needs a previously emitted digit.")
    if opcode == Opcode.COPY:
        return output + output[-1]
    if opcode == Opcode.REPEAT:
        if operand is None or not 1 <= operand <= model.repeat_max:
            raise OutOfRangeError(f"REPEAT count must be in 1..{model.repeat_max}, got {operand}.")
        return output + output[-1] * operand
    if operand is None or not 1 <= operand <= model.exponent_max:
        raise OutOfRangeError(f"POW10 exponent must be in 1..{model.exponent_max}, got {operand}.")
    return output + "0" * operand


def execute(program: Sequence[Instruction], model: Optional[InstructionCostModel] = None) -> str:
    """Runs a digit program and returns its output."""
    model = model or InstructionCostModel()
    output = ""
    for instruction in program:
        output = _apply(output, instruction, model)
    return output


def _candidates(model: InstructionCostModel) -> List[Instruction]:
    candidates = [Instruction(opcode=Opcode.EMIT_DIGIT, operand=d) for d in range(10)]
    candidates.append(Instruction(opcode=Opcode.COPY))
    candidates.extend(Instruction(opcode=Opcode.REPEAT, operand=k) for k in range(1, model.repeat_max + 1))
    candidates.extend(Instruction(opcode=Opcode.POW10, operand=e) for e in range(1, model.exponent_max + 1))
    return candidates


def _sort_key(instruction: Instruction) -> Tuple[int, int]:
    return _OPCODE_ORDER[instruction.opcode], -1 if instruction.operand is None else instruction.operand


class ProgramOracle(ProgramSearch):
    """Exhaustive search for the cheapest digit program, used to check the closed-form codec."""

    def __init__(self, budget_bits: float = 48.0, max_length: int = 8):
        self.budget_bits = budget_bits
        self.max_length = max_length

    def min_program(self, target: str, model: InstructionCostModel,
                    budget: Optional[float] = None) -> DigitProgram:
        """
        Finds the cheapest program whose output is target.

        Programs are explored in order of cost, then lexicographically, so the
        first one reaching the target is the lexicographically first optimum.
        Outputs only grow, so an instruction whose output stops being a prefix
        of the target is never expanded.
        """
        check_digit_string(target, model)
        if len(target) > self.max_length:
            raise TooLongError(f"Target of length {len(target)} exceeds oracle limit {self.max_length}.")
        budget = self.budget_bits if budget is None else budget
        candidates = [(instruction, _sort_key(instruction), instruction_cost(instruction, model))
                      for instruction in _candidates(model)]

        heap: List[Tuple[float, Tuple, float, str, Tuple[Instruction, ...]]] = [(0.0, (), 0.0, "", ())]
        while heap:
            _, key, cost, output, program = heapq.heappop(heap)
            if output == target:
                emitted = sum(1 for instruction in program if instruction.opcode == Opcode.EMIT_DIGIT)
                return DigitProgram(instructions=list(program), cost=cost, emitted_digits=emitted)
            for instruction, instruction_key, step_cost in candidates:
                if not output and instruction.opcode != Opcode.EMIT_DIGIT:
                    continue
                new_cost = cost + step_cost
                if new_cost > budget + TOLERANCE:
                    continue
                new_output = _apply(output, instruction, model)
                if not target.startswith(new_output):
                    continue
                heapq.heappush(heap, (round(new_cost, 9), key + (instruction_key,), new_cost,
                                      new_output, program + (instruction,)))
        raise ProgramNotFoundError(f"No program within {budget} bits outputs {target!r}.")

    def equivalence_sweep(self, max_len: int, model: InstructionCostModel,
                          show_progress: bool = True) -> OracleCheckResult:
        """Compares the codec against exhaustive search on every digit string up to max_len."""
        total = sum(10 ** length for length in range(1, max_len + 1))
        mismatches: List[OracleMismatch] = []
        targets = ("".join(digits) for length in range(1, max_len + 1)
                   for digits in itertools.product("0123456789", repeat=length))
        for target in tqdm(targets, total=total, desc="oracle-check", disable=not show_progress):
            codec_bits = digit_string_complexity(target, model)
            oracle_bits = self.min_program(target, model).cost
            if abs(codec_bits - oracle_bits) > TOLERANCE:
                logger.warning(f"Codec and oracle disagree on {target}: {codec_bits:.6f} vs {oracle_bits:.6f}")
                mismatches.append(OracleMismatch(target=target, codec_bits=codec_bits, oracle_bits=oracle_bits))
        logger.info(f"Oracle check up to length {max_len}: {total} cases, {len(mismatches)} mismatches.")
        return OracleCheckResult(max_len=max_len, opcode_cost=model.opcode_cost, cases=total, mismatches=mismatches)
