"""Conflict analysis: the sequence of clauses learnable from a conflict.

Starting from the (reduced) clause that caused the conflict, antecedents of
propagated literals are resolved in, walking the trail right to left and
skipping positions whose pivot is absent from the running clause. Universal
reduction applies after every resolution and at the start. The sequence is
indexed from the conflict side: element 0 is the reduced conflict
antecedent, the last element is the fully folded clause.

Resolution runs in long-distance mode when the trail propagates through
reduction and in plain mode otherwise; with plain propagation no tautology
can ever arise, so a tautology error here signals a trail bug.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IllegalTautologyError, InternalTautologyError
from .formula import Clause, LDQRES, QCNF, QRES, reduce_clause, resolve_clauses
from .proofs import AXIOM, Derivation, ProofStep, REDUCE, RESOLVE
from .trail import RED, Time, Trail


@dataclass
class LearnableSequence:
    elements: list[Clause]
    steps: list[ProofStep]
    conclusion_ids: list[int]   # per element, the step concluding it
    mode: str

    def derivation_for(self, index: int) -> Derivation:
        end = self.conclusion_ids[index]
        cut = [s for s in self.steps if s.step_id <= end]
        return Derivation(cut, self.mode, end)

    def __len__(self):
        return len(self.elements)


def learnable_sequence(trail: Trail, qcnf: QCNF) -> LearnableSequence:
    if not trail.conflicted:
        raise ValueError("clause learning needs a conflicting trail")
    mode = LDQRES if trail.propagation_policy == RED else QRES
    prefix = qcnf.prefix
    steps: list[ProofStep] = []
    axiom_cache: dict[int, tuple[int, Clause]] = {}

    def add(kind, clause, **kw) -> int:
        steps.append(ProofStep(len(steps), kind, clause, **kw))
        return len(steps) - 1

    def reduced_axiom(cid: int) -> tuple[int, Clause]:
        """Step id and value of red(clause cid), deduplicated per conflict."""
        if cid in axiom_cache:
            return axiom_cache[cid]
        clause = qcnf.clauses[cid]
        sid = add(AXIOM, clause, source=cid)
        red = reduce_clause(clause, prefix)
        if red != clause:
            sid = add(REDUCE, red, src=sid)
        axiom_cache[cid] = (sid, red)
        return axiom_cache[cid]

    conflict = trail.entries[-1]
    cur_id, cur = reduced_axiom(conflict.antecedent)
    elements = [cur]
    conclusions = [cur_id]
    for entry in reversed(trail.entries[:-1]):
        if entry.is_decision:
            continue
        p = entry.lit
        if -p in cur.lits:
            ante_id, ante = reduced_axiom(entry.antecedent)
            try:
                resolvent = resolve_clauses(cur, ante, -p, mode, prefix)
            except IllegalTautologyError as exc:
                raise InternalTautologyError(
                    f"conflict analysis at literal {p}: {exc}"
                ) from exc
            cur_id = add(RESOLVE, resolvent, pivot=abs(p), left=cur_id, right=ante_id)
            cur = reduce_clause(resolvent, prefix)
            if cur != resolvent:
                cur_id = add(REDUCE, cur, src=cur_id)
        elements.append(cur)
        conclusions.append(cur_id)
    return LearnableSequence(elements, steps, conclusions, mode)


def _is_unit_here(clause: Clause, assignment, qcnf: QCNF, policy: str) -> bool:
    """Unit test used for asserting times; the conflict case counts.

    Under reduction-aware propagation a restriction left with only universal
    literals is as good as falsified, hence unit in the extended sense.
    """
    from .trail import _classify

    forced, satisfied = _classify(qcnf, clause, assignment, policy)
    return not satisfied and forced is not None


def asserting_time(clause: Clause, trail: Trail, qcnf: QCNF,
                   propagation_policy: str | None = None) -> Time | None:
    """Earliest time strictly before the conflict level at which the clause
    becomes unit (or falsified) under the propagation policy; None if never.
    """
    if clause.is_empty():
        return None
    policy = propagation_policy or trail.propagation_policy
    r = trail.last_level
    if r == 0:
        return None
    assignment: dict[int, bool] = {}
    if _is_unit_here(clause, assignment, qcnf, policy):
        return (0, 0)
    for e in trail.entries:
        if e.level >= r:   # positions at the conflict level are too late
            break
        assignment[abs(e.lit)] = e.lit > 0
        if _is_unit_here(clause, assignment, qcnf, policy):
            return (e.level, e.offset)
    return None


@dataclass(frozen=True)
class LearningScheme:
    kind: str       # "dec" | "asserting" | "index"
    k: int = 0

    def __str__(self):
        return f"index:{self.k}" if self.kind == "index" else self.kind


DEC = LearningScheme("dec")
ASSERTING = LearningScheme("asserting")


def parse_scheme(text: str) -> LearningScheme:
    if text in ("dec", "asserting"):
        return LearningScheme(text)
    if text.startswith("index:"):
        return LearningScheme("index", int(text.split(":", 1)[1]))
    raise ValueError(f"unknown learning scheme {text!r}")


@dataclass(frozen=True)
class Picked:
    clause: Clause
    time: Time
    index: int


def pick_learned(scheme: LearningScheme, seq: LearnableSequence, trail: Trail,
                 qcnf: QCNF) -> Picked:
    """Choose the clause to learn and the backtrack target.

    The asserting scheme prefers the empty clause, then the first asserting
    element scanning from the conflict side, and falls back to the last
    element. The returned time is the clause's asserting time when it has
    one and (0, 0) — a restart — otherwise.
    """
    if not seq.elements:
        raise ValueError("empty learnable sequence")
    if scheme.kind == "dec":
        index = len(seq.elements) - 1
    elif scheme.kind == "index":
        if not 0 <= scheme.k < len(seq.elements):
            raise ValueError(
                f"scheme index {scheme.k} out of range (sequence length {len(seq.elements)})"
            )
        index = scheme.k
    elif scheme.kind == "asserting":
        index = None
        for i, c in enumerate(seq.elements):
            if c.is_empty():
                index = i
                break
        if index is None:
            for i, c in enumerate(seq.elements):
                if asserting_time(c, trail, qcnf) is not None:
                    index = i
                    break
        if index is None:
            index = len(seq.elements) - 1
    else:
        raise ValueError(f"unknown scheme kind {scheme.kind!r}")
    clause = seq.elements[index]
    time = asserting_time(clause, trail, qcnf) if not clause.is_empty() else None
    return Picked(clause, time or (0, 0), index)
