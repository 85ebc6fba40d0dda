"""Trails: decision-leveled assignment sequences with antecedents.

A trail is a sequence of entries. Level 0 holds propagations forced by the
formula alone; every later level starts with one decision. Propagated
literals are always existential; the conflict marker (literal 0) may only be
the last entry and carries the falsified clause as its antecedent.

Times: (s, t) names the subtrail through the t-th propagation of level s;
(s, 0) ends at the decision of level s, and (0, 0) is the empty trail.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    IllegalDecisionError,
    InvalidTimeError,
    PendingPropagationError,
    ScriptDivergenceError,
)
from .formula import QCNF

LEV_ORD = "lev-ord"
ASS_ORD = "ass-ord"
ASS_R_ORD = "ass-r-ord"
ANY_ORD = "any-ord"
DECISION_POLICIES = (LEV_ORD, ASS_ORD, ASS_R_ORD, ANY_ORD)

RED = "red"
NO_RED = "no-red"
PROPAGATION_POLICIES = (RED, NO_RED)

Time = tuple[int, int]


@dataclass(frozen=True)
class TrailEntry:
    lit: int                 # 0 marks the conflict
    antecedent: int | None   # clause id; None exactly for decisions
    level: int
    offset: int              # 0 for decisions, 1.. for propagations

    @property
    def is_decision(self) -> bool:
        return self.antecedent is None


class Trail:
    """Mutable trail builder; snapshots via ``copy()`` are value-like."""

    def __init__(self, decision_policy: str, propagation_policy: str):
        if decision_policy not in DECISION_POLICIES:
            raise ValueError(f"unknown decision policy {decision_policy!r}")
        if propagation_policy not in PROPAGATION_POLICIES:
            raise ValueError(f"unknown propagation policy {propagation_policy!r}")
        self.decision_policy = decision_policy
        self.propagation_policy = propagation_policy
        self.entries: list[TrailEntry] = []
        self.assignment: dict[int, bool] = {}
        self._level = 0
        self._offset = 0
        self._satisfied: set[int] = set()   # clause-id cache, monotone per build

    # -- shape ---------------------------------------------------------

    @property
    def last_level(self) -> int:
        return self._level

    @property
    def conflicted(self) -> bool:
        return bool(self.entries) and self.entries[-1].lit == 0

    def __len__(self) -> int:
        return len(self.entries)

    def decisions(self) -> list[int]:
        return [e.lit for e in self.entries if e.is_decision]

    def literals(self) -> list[int]:
        return [e.lit for e in self.entries if e.lit != 0]

    def level_width(self, level: int) -> int:
        """Number of propagations in the given level (the conflict counts)."""
        return sum(
            1 for e in self.entries if e.level == level and not e.is_decision
        )

    def time_of_position(self, pos: int) -> Time:
        if pos == -1:
            return (0, 0)
        e = self.entries[pos]
        return (e.level, e.offset)

    def position_of_time(self, time: Time) -> int:
        """Index of the last entry of the subtrail at ``time`` (-1 for (0,0))."""
        s, t = time
        if (s, t) == (0, 0):
            return -1
        for pos, e in enumerate(self.entries):
            if e.level == s and e.offset == t:
                return pos
        raise InvalidTimeError(f"time {time} not on the trail")

    def is_valid_time(self, time: Time) -> bool:
        try:
            self.position_of_time(time)
            return True
        except InvalidTimeError:
            return False

    # -- construction ----------------------------------------------------

    def append_decision(self, lit: int):
        self._level += 1
        self._offset = 0
        self.entries.append(TrailEntry(lit, None, self._level, 0))
        self.assignment[abs(lit)] = lit > 0

    def append_propagation(self, lit: int, antecedent: int):
        self._offset += 1
        self.entries.append(TrailEntry(lit, antecedent, self._level, self._offset))
        self.assignment[abs(lit)] = lit > 0

    def append_conflict(self, antecedent: int):
        self._offset += 1
        self.entries.append(TrailEntry(0, antecedent, self._level, self._offset))

    def copy(self) -> "Trail":
        t = Trail(self.decision_policy, self.propagation_policy)
        t.entries = list(self.entries)
        t.assignment = dict(self.assignment)
        t._level = self._level
        t._offset = self._offset
        t._satisfied = set(self._satisfied)
        return t

    def backtrack(self, time: Time) -> "Trail":
        """The subtrail at ``time`` as a fresh trail."""
        pos = self.position_of_time(time)
        t = Trail(self.decision_policy, self.propagation_policy)
        for e in self.entries[: pos + 1]:
            t.entries.append(e)
            if e.lit != 0:
                t.assignment[abs(e.lit)] = e.lit > 0
        if t.entries:
            t._level = t.entries[-1].level
            t._offset = t.entries[-1].offset
        return t


def backtrack(trail: Trail, time: Time) -> Trail:
    return trail.backtrack(time)


def dump_trail(trail: Trail) -> str:
    """One entry per line for golden comparisons: tag D (decision),
    P (propagation) or K (conflict), the literal, and the antecedent
    clause id for P/K lines."""
    lines = []
    for e in trail.entries:
        if e.lit == 0:
            lines.append(f"K {e.antecedent}")
        elif e.is_decision:
            lines.append(f"D {e.lit}")
        else:
            lines.append(f"P {e.lit} {e.antecedent}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- unit scanning --------------------------------------------------------


@dataclass
class UnitScanResult:
    """Clauses forcing a literal (or the conflict 0) under the current trail."""

    entries: tuple[tuple[int, int], ...]   # (clause id, forced literal or 0)
    conflict_present: bool

    def conflicts(self):
        return [cid for cid, lit in self.entries if lit == 0]

    def units(self):
        return [(cid, lit) for cid, lit in self.entries if lit != 0]


def _classify(qcnf: QCNF, clause, assignment, policy):
    """(forced literal | 0 for conflict | None, satisfied flag).

    Fused restriction + reduction + unit test; avoids building intermediate
    clauses since this sits inside the propagation loop.
    """
    prefix = qcnf.prefix
    for v in clause.merged:
        if v in assignment:
            return None, True
    alive = []
    for l in clause.lits:
        val = assignment.get(abs(l))
        if val is None:
            alive.append(l)
        elif val == (l > 0):
            return None, True
    merged_alive = clause.merged
    if policy == RED:
        ex_max = 0
        for l in alive:
            if prefix.is_existential(l):
                lev = prefix.level(l)
                if lev > ex_max:
                    ex_max = lev
        if ex_max == 0:
            return 0, False
        alive = [
            l for l in alive if prefix.is_existential(l) or prefix.level(l) <= ex_max
        ]
        merged_alive = [v for v in clause.merged if prefix.level(v) <= ex_max]
    if not alive and not merged_alive:
        return 0, False
    if len(alive) == 1 and not merged_alive and prefix.is_existential(alive[0]):
        return alive[0], False
    return None, False


def unit_scan(qcnf: QCNF, trail: Trail, propagation_policy: str | None = None) -> UnitScanResult:
    """Enumerate every clause that is unit or falsified under the trail.

    Under NO-RED a clause shrunk to a single universal literal is neither
    unit nor a conflict; under RED reduction applies first, so the same
    clause is a conflict.
    """
    policy = propagation_policy or trail.propagation_policy
    use_cache = policy == trail.propagation_policy
    entries = []
    conflict = False
    for cid, clause in enumerate(qcnf.clauses):
        if use_cache and cid in trail._satisfied:
            continue
        forced, satisfied = _classify(qcnf, clause, trail.assignment, policy)
        if satisfied:
            if use_cache:
                trail._satisfied.add(cid)
            continue
        if forced is None:
            continue
        entries.append((cid, forced))
        conflict = conflict or forced == 0
    return UnitScanResult(tuple(entries), conflict)


def propagate_to_fixpoint(qcnf: QCNF, trail: Trail, chooser=None, forced=None) -> Trail:
    """Extend the trail with forced literals until quiescence or conflict.

    Conflicts have priority: whenever some clause is falsified, the conflict
    is taken immediately. Among several available conflicts or units the
    default chooser takes the lowest clause id. ``forced`` optionally holds
    scripted (literal, clause id) pairs, honored in order as soon as they
    become available; assigning a pending override's variable through a
    different antecedent raises ScriptDivergenceError.
    """
    while not trail.conflicted:
        scan = unit_scan(qcnf, trail)
        if scan.conflict_present:
            cid = min(scan.conflicts())
            trail.append_conflict(cid)
            return trail
        units = scan.units()
        if not units:
            return trail
        if forced and (forced[0][1], forced[0][0]) in units:
            lit, cid = forced.popleft()
        else:
            if chooser is not None:
                cid, lit = chooser(units)
            else:
                cid, lit = min(units, key=lambda u: (u[0], abs(u[1])))
            if forced and abs(lit) == abs(forced[0][0]):
                raise ScriptDivergenceError(
                    f"literal {forced[0][0]} would be assigned via clause {cid}, "
                    f"not the scripted antecedent {forced[0][1]}"
                )
        trail.append_propagation(lit, cid)
    return trail


# -- decisions -------------------------------------------------------------


def legal_decisions(trail: Trail, qcnf: QCNF, decision_policy: str | None = None) -> set[int]:
    """The literals the decision policy admits as the next decision."""
    policy = decision_policy or trail.decision_policy
    prefix = qcnf.prefix
    unassigned = sorted(prefix.variables - set(trail.assignment))
    if not unassigned:
        return set()
    if policy == ANY_ORD:
        allowed = unassigned
    elif policy == LEV_ORD:
        lowest = min(prefix.level(v) for v in unassigned)
        allowed = [v for v in unassigned if prefix.level(v) == lowest]
    elif policy == ASS_ORD:
        floor = max((prefix.level(d) for d in trail.decisions()), default=0)
        allowed = [
            v
            for v in unassigned
            if prefix.is_existential(v) or prefix.level(v) >= floor
        ]
    elif policy == ASS_R_ORD:
        decided = {abs(d) for d in trail.decisions()}
        universals = sorted(v for v in prefix.variables if prefix.is_universal(v))
        allowed = []
        for v in unassigned:
            if prefix.is_universal(v):
                allowed.append(v)
            elif all(
                u in decided for u in universals if prefix.level(u) < prefix.level(v)
            ):
                allowed.append(v)
    else:  # pragma: no cover
        raise ValueError(policy)
    return {lit for v in allowed for lit in (v, -v)}


def decide(trail: Trail, lit: int, qcnf: QCNF, decision_policy: str | None = None) -> Trail:
    """Open a new decision level with ``lit``.

    Refuses repeated variables and policy violations; naturality forbids
    deciding while a propagation (or conflict) is still available.
    """
    policy = decision_policy or trail.decision_policy
    if abs(lit) in trail.assignment:
        raise IllegalDecisionError(f"variable {abs(lit)} already assigned")
    scan = unit_scan(qcnf, trail)
    if scan.entries:
        raise PendingPropagationError(
            f"cannot decide {lit}: clause {scan.entries[0][0]} is "
            + ("falsified" if scan.entries[0][1] == 0 else "unit")
        )
    if lit not in legal_decisions(trail, qcnf, policy):
        raise IllegalDecisionError(f"literal {lit} violates policy {policy}")
    trail.append_decision(lit)
    return trail


# -- validation ------------------------------------------------------------


def _certifies(qcnf: QCNF, clause_id: int, assignment, lit: int, policy: str) -> bool:
    forced, _ = _classify(qcnf, qcnf.clauses[clause_id], assignment, policy)
    return forced == lit


def validate_trail(qcnf: QCNF, trail: Trail, natural_from: int = 0) -> list[str]:
    """Re-derive every trail condition from the formula; returns violations.

    ``natural_from`` is the entry index after which naturality (no skipped
    units, conflict priority) is enforced; antecedent certificates, policy
    legality and shape conditions are always enforced. Positions before
    ``natural_from`` belong to an inherited backtrack prefix, whose
    propagations were natural with respect to an earlier clause set.
    """
    problems = []
    shadow = Trail(trail.decision_policy, trail.propagation_policy)
    for pos, e in enumerate(trail.entries):
        natural_here = pos >= natural_from
        scan = None
        if natural_here:
            scan = unit_scan(qcnf, shadow, trail.propagation_policy)
        if e.lit == 0:
            if pos != len(trail.entries) - 1:
                problems.append(f"entry {pos}: conflict marker not rightmost")
            if e.antecedent is None or not _certifies(
                qcnf, e.antecedent, shadow.assignment, 0, trail.propagation_policy
            ):
                problems.append(f"entry {pos}: antecedent does not certify the conflict")
            shadow.append_conflict(e.antecedent or 0)
            continue
        if abs(e.lit) in shadow.assignment:
            problems.append(f"entry {pos}: variable {abs(e.lit)} repeated")
            break
        if e.is_decision:
            if natural_here and scan.entries:
                problems.append(f"entry {pos}: decision skips pending propagation")
            if e.lit not in legal_decisions(shadow, qcnf, trail.decision_policy):
                problems.append(
                    f"entry {pos}: decision {e.lit} violates {trail.decision_policy}"
                )
            shadow.append_decision(e.lit)
        else:
            if not qcnf.prefix.is_existential(e.lit):
                problems.append(f"entry {pos}: propagated literal {e.lit} not existential")
            if e.antecedent is None or not _certifies(
                qcnf, e.antecedent, shadow.assignment, e.lit, trail.propagation_policy
            ):
                problems.append(f"entry {pos}: antecedent does not certify {e.lit}")
            if natural_here and scan.conflict_present:
                problems.append(f"entry {pos}: propagation taken while a conflict exists")
            shadow.append_propagation(e.lit, e.antecedent or 0)
        if (e.level, e.offset) != (shadow.entries[-1].level, shadow.entries[-1].offset):
            problems.append(f"entry {pos}: level/offset bookkeeping mismatch")
    return problems
