from typing import Dict, List, Optional

from core.models import AtomCost, OracleCheckResult, ScoreReport


def summary(report: ScoreReport, name: Optional[str] = None) -> str:
    """One-paragraph human-readable summary of a score."""
    probability = "undefined (U < 0)" if report.cognitive_probability is None \
        else f"{report.cognitive_probability:.4g}"
    lines = [
        f"Scenario: {name or '<unnamed>'}",
        f"  Cw = {report.cw_bits:.4f} bits, C = {report.c_bits:.4f} bits, U = {report.u_bits:.4f} bits",
        f"  cognitive probability: {probability}",
        f"  hypotheses used: {', '.join(report.hypotheses_used) or 'none'}",
    ]
    if report.sequence_bound is not None:
        lines.append(f"  first-then-second bound: {report.sequence_bound:.4f} bits")
    return "\n".join(lines)


def explain_table(report: ScoreReport) -> str:
    """Per-atom table of W and O costs with the rules that fired, followed by both best sequences."""
    world: Dict[int, AtomCost] = {cost.index: cost for cost in report.w_breakdown.per_atom}
    observation: Dict[int, AtomCost] = {cost.index: cost for cost in report.o_breakdown.per_atom}
    indices = sorted(set(world) | set(observation))
    labels = {index: (world.get(index) or observation.get(index)).atom for index in indices}
    width = max([len("atom")] + [len(label) for label in labels.values()])

    def cell(cost: Optional[AtomCost]) -> str:
        return f"{'-':>9} {'':<22}" if cost is None else f"{cost.bits:>9.4f} {cost.rule:<22}"

    rows: List[str] = [f"{'atom':<{width}}  {'W bits':>9} {'W rule':<22}{'O bits':>9} {'O rule':<22}"]
    for index in indices:
        rows.append(f"{labels[index]:<{width}}  {cell(world.get(index))}{cell(observation.get(index))}".rstrip())
        for cost in (world.get(index), observation.get(index)):
            if cost is not None and cost.detail:
                rows.append(f"{'':<{width}}    {cost.machine.value}: {cost.detail}")
    rows.append(f"{'total':<{width}}  {report.cw_bits:>9.4f} {'':<22}{report.c_bits:>9.4f}")
    rows.append("")
    rows.append("W sequence: " + " * ".join(report.w_sequence))
    rows.append("O sequence: " + " * ".join(report.o_sequence))
    rows.append(f"Hypothesis decision: {', '.join(report.hypotheses_used) or 'none included'}")
    rows.append(f"U = {report.u_bits:.4f} bits")
    return "\n".join(rows)


def oracle_summary(result: OracleCheckResult) -> str:
    lines = [f"max_len={result.max_len} opcode_cost={result.opcode_cost:g} "
             f"cases={result.cases} mismatches={len(result.mismatches)}"]
    lines.extend(f"  {m.target}: codec {m.codec_bits:.6f} oracle {m.oracle_bits:.6f}" for m in result.mismatches)
    return "\n".join(lines)
