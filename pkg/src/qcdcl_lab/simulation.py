"""Constructive translation of plain (merge-free) resolution refutations
into runs of the flexible-decision / no-reduction solving system.

The engine walks the input refutation clause by clause, maintaining for each
processed clause a *witness*: a trail whose decisions are a subset of the
clause's negated literals and which propagates one of the clause's
(existential) literals anyway. A clause with such a witness is "absorbed":
deciding its negation cannot be completed innocently. Clauses are processed
optimistically ("pretend reliable"): we attempt the prescribed trail
construction, and either run into a conflict (feeding a learn/backtrack loop
that stops after quadratically many rounds) or get blocked, which hands us
the witness directly. Learning the empty clause anywhere ends the whole
translation early.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InputNotRefutationError,
    LoopBoundExceededError,
    SimulationError,
    WitnessInvalidError,
)
from .formula import Clause, QCNF, QRES
from .learning import ASSERTING, learnable_sequence, pick_learned
from .proofs import (
    AXIOM,
    Derivation,
    QcdclProof,
    REDUCE,
    RESOLVE,
    Round,
    check_derivation,
    clause_key,
)
from .trail import (
    ASS_ORD,
    NO_RED,
    Time,
    Trail,
    legal_decisions,
    propagate_to_fixpoint,
    validate_trail,
)

# Round-count ceiling for the unreliability loop, as a multiple of n^2.
# The loop is quadratically bounded; the constant gives slack for the
# degenerate re-conflict rounds. Exceeding it signals a bug.
LOOP_BOUND_FACTOR = 8


@dataclass(frozen=True)
class Witness:
    """Evidence that deciding a clause's negation gets blocked.

    ``trail`` propagates ``literal`` (an existential literal of the clause)
    while its decisions are contained in the clause's negation minus the
    literal's complement. ``decisions`` records them in trail order.
    """

    trail: Trail
    literal: int
    decisions: tuple[int, ...]


def witness_valid(qcnf: QCNF, witness: Witness, clause: Clause) -> bool:
    """Re-validate a witness against the current clause set.

    Clause ids are stable and clauses are only ever added, so propagation
    certificates persist; this re-checks them, the policy conditions, and
    the containment requirements.
    """
    t = witness.trail
    if t.conflicted:
        return False
    if validate_trail(qcnf, t, natural_from=len(t.entries)):
        return False
    if witness.literal not in clause.lits:
        return False
    if not qcnf.prefix.is_existential(witness.literal):
        return False
    propagated = {e.lit for e in t.entries if not e.is_decision}
    if witness.literal not in propagated:
        return False
    neg = {-l for l in clause.lits}
    neg.discard(-witness.literal)
    return all(d in neg for d in witness.decisions) and tuple(t.decisions()) == tuple(
        witness.decisions
    )


@dataclass
class SimState:
    """Mutable simulation state: growing formula, accumulated rounds,
    and the witness table keyed by canonical clause form."""

    work: QCNF
    scheme: object = ASSERTING
    rounds: list[Round] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    next_backtrack: Time = (0, 0)
    done: bool = False   # set once the empty clause is learned
    loop_lengths: list[int] = field(default_factory=list)   # rounds per unreliability loop

    def proof(self, decision_policy=ASS_ORD, propagation_policy=NO_RED) -> QcdclProof:
        return QcdclProof(self.rounds, decision_policy, propagation_policy)

    def lookup(self, clause: Clause) -> Witness | None:
        key = clause_key(clause, self.work.prefix)
        w = self.witnesses.get(key)
        if w is None:
            return None
        if not witness_valid(self.work, w, clause):
            # Additions cannot invalidate a witness; a failure here means
            # the recorded trail was broken when stored.
            raise WitnessInvalidError(f"stored witness for {clause!r} fails re-validation")
        return w

    def store(self, clause: Clause, witness: Witness):
        if not witness_valid(self.work, witness, clause):
            raise WitnessInvalidError(f"new witness for {clause!r} does not validate")
        self.witnesses[clause_key(clause, self.work.prefix)] = witness


COMPLETED = "completed"
CONFLICTED = "conflicted"
BLOCKED = "blocked"


@dataclass
class ConstructResult:
    kind: str
    trail: Trail
    blocked_on: int | None = None    # the scripted literal whose negation arrived

    def witness_for(self, clause: Clause) -> Witness:
        assert self.kind == BLOCKED
        return Witness(
            trail=self.trail,
            literal=-self.blocked_on,
            decisions=tuple(self.trail.decisions()),
        )


def construct_trail_with_decisions(state: SimState, decisions, start: Trail | None = None) -> ConstructResult:
    """Build a natural trail deciding the listed literals in order.

    A listed literal already assigned in the same polarity is skipped; one
    assigned opposite means the decisions block each other and the partial
    trail is returned as a witness carrier. Conflicts abort the walk as
    usual. Decision legality under the flexible policy is enforced.
    """
    trail = start.copy() if start is not None else Trail(ASS_ORD, NO_RED)
    propagate_to_fixpoint(state.work, trail)
    for lit in decisions:
        if trail.conflicted:
            return ConstructResult(CONFLICTED, trail)
        var = abs(lit)
        if var in trail.assignment:
            if trail.assignment[var] == (lit > 0):
                continue
            return ConstructResult(BLOCKED, trail, blocked_on=lit)
        if lit not in legal_decisions(trail, state.work, ASS_ORD):
            from .errors import IllegalDecisionError

            raise IllegalDecisionError(
                f"decision {lit} violates the flexible policy in this order"
            )
        trail.append_decision(lit)
        propagate_to_fixpoint(state.work, trail)
    if trail.conflicted:
        return ConstructResult(CONFLICTED, trail)
    return ConstructResult(COMPLETED, trail)


@dataclass
class UnreliableResult:
    kind: str                  # "empty" | "witness"
    witness: Witness | None = None


def _record_round(state: SimState, trail: Trail, picked) -> None:
    seq = learnable_sequence(trail, state.work)
    state.rounds.append(
        Round(
            trail=trail,
            learned=picked.clause,
            clause_id=len(state.work.clauses),
            derivation=seq.derivation_for(picked.index),
            backtrack=state.next_backtrack,
            picked_index=picked.index,
            duplicate=any(
                clause_key(picked.clause, state.work.prefix) == clause_key(c, state.work.prefix)
                for c in state.work.clauses
            ),
        )
    )
    state.work.add_clause(picked.clause)


def make_unreliable(state: SimState, target: Clause, initial: Trail,
                    decision_order) -> UnreliableResult:
    """Learn/backtrack with a fixed decision order until the order blocks
    (yielding a witness for ``target``) or the empty clause is learned.

    Each round learns with the asserting scheme, backtracks to the learned
    clause's asserting time, and re-extends with the same decisions in the
    same order. Rounds are appended to the state. The loop is quadratically
    bounded in the variable count; exceeding the ceiling raises.
    """
    n = max(state.work.num_vars, 1)
    bound = LOOP_BOUND_FACTOR * n * n + 8
    trail = initial
    for iteration in range(bound):
        if not trail.conflicted:
            raise SimulationError("unreliability loop handed a conflict-free trail")
        seq = learnable_sequence(trail, state.work)
        picked = pick_learned(state.scheme, seq, trail, state.work)
        _record_round(state, trail, picked)
        if picked.clause.is_empty():
            state.done = True
            state.loop_lengths.append(iteration + 1)
            return UnreliableResult("empty")
        state.next_backtrack = picked.time
        prefix_trail = trail.backtrack(picked.time)
        result = construct_trail_with_decisions(state, decision_order, start=prefix_trail)
        if result.kind == BLOCKED:
            state.next_backtrack = (0, 0)
            state.loop_lengths.append(iteration + 1)
            return UnreliableResult("witness", result.witness_for(target))
        if result.kind == COMPLETED:
            raise SimulationError(
                "re-extension completed without conflict or block; "
                "the premise witnesses must have been wrong"
            )
        trail = result.trail
    raise LoopBoundExceededError(
        f"unreliability loop exceeded {bound} rounds on {target!r}"
    )


def _level_sorted(state: SimState, lits) -> list[int]:
    prefix = state.work.prefix
    return sorted(set(lits), key=lambda l: (prefix.level(l), abs(l)))


def _finish(state: SimState, target: Clause, result: ConstructResult, order) -> Witness | None:
    """Common tail: a construction either blocked (direct witness) or
    conflicted (enter the unreliability loop)."""
    if result.kind == BLOCKED:
        state.next_backtrack = (0, 0)
        return result.witness_for(target)
    if result.kind == CONFLICTED:
        out = make_unreliable(state, target, result.trail, order)
        return out.witness if out.kind == "witness" else None
    raise SimulationError(
        f"construction for {target!r} completed; a conflict or block was forced"
    )


def simulate_axiom(state: SimState, clause: Clause) -> Witness | None:
    """Decide the clause's negation level-ordered; the clause itself forces
    a conflict at the latest when all decisions are placed."""
    order = _level_sorted(state, [-l for l in clause.all_literals()])
    result = construct_trail_with_decisions(state, order)
    return _finish(state, clause, result, order)


def simulate_resolution(state: SimState, resolvent: Clause, pivot_var: int,
                        left: Clause, right: Clause) -> Witness | None:
    """Three-way case split on the premise witnesses' literals versus the
    pivot. Either some construction blocks (direct witness), or a conflict
    feeds the unreliability loop; the hard case re-enters with the pivot
    witness after a restart."""
    pivot = pivot_var if pivot_var in left.lits else -pivot_var
    w1 = state.lookup(left)
    w2 = state.lookup(right)
    if w1 is None or w2 is None:
        raise SimulationError("premise witness missing; processing order broken")
    return _resolution_cases(state, resolvent, pivot, left, right, w1, w2)


def _resolution_cases(state, resolvent, pivot, left, right, w1, w2):
    l1, a1 = w1.literal, w1.decisions
    l2, a2 = w2.literal, w2.decisions

    if l1 == pivot and l2 == -pivot:
        order = _level_sorted(state, list(a1) + list(a2))
        result = construct_trail_with_decisions(state, order)
        return _finish(state, resolvent, result, order)

    if l1 == pivot or l2 == -pivot:
        if l2 == -pivot:   # mirror so the pivot-side witness is w1
            l1, l2 = l2, l1
            a1, a2 = a2, a1
            pivot = -pivot
        wanted = set(a1) | set(a2) | {-l2}
        wanted.discard(pivot)
        wanted.discard(-pivot)
        order = _level_sorted(state, wanted)
        result = construct_trail_with_decisions(state, order)
        return _finish(state, resolvent, result, order)

    # Neither witness literal is the pivot.
    if -pivot not in a1:
        # The left witness never even decides against the pivot: it is
        # already a witness for the resolvent.
        w = Witness(w1.trail, l1, a1)
        return w

    head = _level_sorted(state, (set(a1) | {-l1}) - {-pivot})
    order = head + [-pivot]
    result = construct_trail_with_decisions(state, order)
    if result.kind == BLOCKED:
        if result.blocked_on == -pivot:
            # The pivot got propagated first: fall back to the union trail.
            wanted = (set(a1) | set(a2) | {-l1, -l2}) - {pivot, -pivot}
            order2 = _level_sorted(state, wanted)
            result2 = construct_trail_with_decisions(state, order2)
            return _finish(state, resolvent, result2, order2)
        state.next_backtrack = (0, 0)
        return result.witness_for(resolvent)
    if result.kind == COMPLETED:
        raise SimulationError("pivot-side construction completed unexpectedly")
    out = make_unreliable(state, left, result.trail, order)
    if out.kind == "empty":
        return None
    w = out.witness
    if -pivot in w.decisions:
        raise SimulationError("block happened after the pivot decision")
    if w.literal != pivot:
        return Witness(w.trail, w.literal, w.decisions)
    # The new witness propagates the pivot itself: restart and run the
    # mixed construction with it.
    state.next_backtrack = (0, 0)
    return _resolution_cases(state, resolvent, pivot, left, right, w, w2)


def simulate_reduction(state: SimState, reduced: Clause, source: Clause) -> Witness | None:
    """Decide the source clause's negation with the dropped universal
    literals last; blocks can only hit existential positions, so a witness
    for the source restricted this way is one for the reduced clause."""
    w = state.lookup(source)
    if w is None:
        raise SimulationError("premise witness missing; processing order broken")
    if clause_key(source, state.work.prefix) == clause_key(reduced, state.work.prefix):
        return w
    dropped = source.variables() - reduced.variables()
    wanted = set(w.decisions) | {-w.literal}
    head = _level_sorted(state, [l for l in wanted if abs(l) not in dropped])
    tail = _level_sorted(state, [l for l in wanted if abs(l) in dropped])
    order = head + tail
    result = construct_trail_with_decisions(state, order)
    if result.kind == BLOCKED:
        state.next_backtrack = (0, 0)
        return result.witness_for(reduced)
    if result.kind == COMPLETED:
        raise SimulationError("reduction construction completed unexpectedly")
    out = make_unreliable(state, source, result.trail, order)
    if out.kind == "empty":
        return None
    w2 = out.witness
    if any(abs(d) in dropped for d in w2.decisions):
        raise SimulationError("block happened inside the universal tail")
    return Witness(w2.trail, w2.literal, w2.decisions)


def simulate_clause(state: SimState, step, computed: dict) -> None:
    """Process one input-refutation step, extending the state with rounds
    and (unless the empty clause was derived) a witness for its clause."""
    clause = computed[step.step_id]
    if state.done:
        return
    existing = state.lookup(clause)
    if existing is not None:
        return
    if step.kind == AXIOM:
        w = simulate_axiom(state, clause)
    elif step.kind == RESOLVE:
        w = simulate_resolution(
            state, clause, step.pivot, computed[step.left], computed[step.right]
        )
    elif step.kind == REDUCE:
        w = simulate_reduction(state, clause, computed[step.src])
    else:   # pragma: no cover
        raise SimulationError(f"unknown step kind {step.kind!r}")
    if state.done:
        return
    if w is None:
        raise SimulationError(f"no witness and no empty clause for {clause!r}")
    state.store(clause, w)


def run_simulation(qcnf: QCNF, derivation: Derivation, scheme=ASSERTING) -> SimState:
    """Full simulation run; the returned state carries the rounds, the
    witness table, and per-loop round counts for bound assertions."""
    verdict = check_derivation(qcnf, derivation, QRES, require_refutation=True)
    if not verdict:
        raise InputNotRefutationError(f"input does not check: {verdict.failures[:3]}")
    computed = _recompute_clauses(qcnf, derivation)
    state = SimState(work=qcnf.copy(), scheme=scheme)
    for step in derivation.steps:
        state.next_backtrack = (0, 0)
        simulate_clause(state, step, computed)
        if state.done:
            break
    if not state.done:
        raise SimulationError("walked the whole refutation without deriving the empty clause")
    return state


def simulate_refutation(qcnf: QCNF, derivation: Derivation, scheme=ASSERTING) -> QcdclProof:
    """Translate a checked merge-free refutation into a flexible-decision,
    no-reduction solver refutation, restarting between per-clause blocks."""
    return run_simulation(qcnf, derivation, scheme).proof()


def _recompute_clauses(qcnf: QCNF, derivation: Derivation) -> dict[int, Clause]:
    """Normalized clause of every step (the checker has already accepted)."""
    from .formula import make_clause, reduce_clause, resolve_clauses

    computed: dict[int, Clause] = {}
    for s in derivation.steps:
        if s.kind == AXIOM:
            computed[s.step_id] = make_clause(qcnf.prefix, s.clause.all_literals())
        elif s.kind == RESOLVE:
            left = computed[s.left]
            pivot = s.pivot if s.pivot in left.lits else -s.pivot
            computed[s.step_id] = resolve_clauses(
                left, computed[s.right], pivot, QRES, qcnf.prefix
            )
        else:
            computed[s.step_id] = reduce_clause(computed[s.src], qcnf.prefix)
    return computed
