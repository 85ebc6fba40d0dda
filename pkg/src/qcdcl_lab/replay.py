"""Deterministic replay of scripted runs.

A script prescribes, per round, the decisions in order, the learning choice,
and the backtrack target. Propagation between decisions is the normal
natural propagation; if a scripted decision's variable was already
propagated in the same polarity the decision is skipped, and an opposite
propagation is a divergence. Optional `p <lit> <clause-id>` lines pin the
next propagation to a named antecedent, which must actually be forcing at
its turn.

File format, line-oriented:

    round
    d <lit> [<lit> ...]
    p <lit> <clause-id>          # optional forced-propagation overrides
    learn <asserting|dec|index:k>
    back <s> <t> | back restart | back asserting
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ScriptDivergenceError
from .formula import QCNF
from .learning import learnable_sequence, parse_scheme, pick_learned
from .proofs import QcdclProof, Round, clause_key
from .trail import Time, Trail, decide, propagate_to_fixpoint


@dataclass
class ScriptRound:
    decisions: list[int] = field(default_factory=list)
    learn: str = "asserting"            # "asserting" | "dec" | "index:k"
    back: str | Time = "restart"        # "restart" | "asserting" | (s, t)
    forced: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class ReplayScript:
    rounds: list[ScriptRound]


def parse_script(text: str) -> ReplayScript:
    rounds: list[ScriptRound] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "round":
            rounds.append(ScriptRound())
            continue
        if not rounds:
            raise ScriptDivergenceError(f"line {line_no}: directive before any 'round'")
        cur = rounds[-1]
        if fields[0] == "d":
            cur.decisions.extend(int(f) for f in fields[1:])
        elif fields[0] == "p":
            cur.forced.append((int(fields[1]), int(fields[2])))
        elif fields[0] == "learn":
            cur.learn = fields[1]
        elif fields[0] == "back":
            if fields[1] in ("restart", "asserting"):
                cur.back = fields[1]
            else:
                cur.back = (int(fields[1]), int(fields[2]))
        else:
            raise ScriptDivergenceError(f"line {line_no}: unknown directive {fields[0]!r}")
    return ReplayScript(rounds)


def serialize_script(script: ReplayScript) -> str:
    lines = []
    for rnd in script.rounds:
        lines.append("round")
        if rnd.decisions:
            lines.append("d " + " ".join(map(str, rnd.decisions)))
        for lit, cid in rnd.forced:
            lines.append(f"p {lit} {cid}")
        lines.append(f"learn {rnd.learn}")
        if isinstance(rnd.back, tuple):
            lines.append(f"back {rnd.back[0]} {rnd.back[1]}")
        else:
            lines.append(f"back {rnd.back}")
    return "\n".join(lines) + "\n"


def replay(qcnf: QCNF, script: ReplayScript, decision_policy: str,
           propagation_policy: str) -> QcdclProof:
    """Run the script and return the induced proof.

    The final round must learn the empty clause; any mismatch between the
    script and forced behaviour raises ScriptDivergenceError (decisions that
    violate the policy raise IllegalDecisionError).
    """
    work = qcnf.copy()
    rounds: list[Round] = []
    trail = Trail(decision_policy, propagation_policy)
    start_time: Time = (0, 0)
    for rno, rnd in enumerate(script.rounds):
        forced = deque(rnd.forced)
        propagate_to_fixpoint(work, trail, forced=forced)
        for lit in rnd.decisions:
            if trail.conflicted:
                raise ScriptDivergenceError(
                    f"round {rno}: conflict arrived before decision {lit}"
                )
            var = abs(lit)
            if var in trail.assignment:
                if trail.assignment[var] == (lit > 0):
                    continue   # propagated in the scripted polarity: skip
                raise ScriptDivergenceError(
                    f"round {rno}: {lit} was propagated with opposite polarity"
                )
            decide(trail, lit, work, decision_policy)
            propagate_to_fixpoint(work, trail, forced=forced)
        if not trail.conflicted:
            raise ScriptDivergenceError(f"round {rno}: no conflict after the decisions")
        if forced:
            raise ScriptDivergenceError(f"round {rno}: unused propagation overrides")
        seq = learnable_sequence(trail, work)
        picked = pick_learned(parse_scheme(rnd.learn), seq, trail, work)
        duplicate = any(
            clause_key(picked.clause, work.prefix) == clause_key(c, work.prefix)
            for c in work.clauses
        )
        rounds.append(
            Round(
                trail=trail,
                learned=picked.clause,
                clause_id=len(work.clauses),
                derivation=seq.derivation_for(picked.index),
                backtrack=start_time,
                picked_index=picked.index,
                duplicate=duplicate,
            )
        )
        work.add_clause(picked.clause)
        if picked.clause.is_empty():
            break
        if rnd.back == "restart":
            target: Time = (0, 0)
        elif rnd.back == "asserting":
            target = picked.time
        else:
            target = rnd.back
        start_time = target
        trail = trail.backtrack(target)
    else:
        raise ScriptDivergenceError("script ended without learning the empty clause")
    return QcdclProof(rounds, decision_policy, propagation_policy)
