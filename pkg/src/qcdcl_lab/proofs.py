"""Resolution-style derivations, their checker, and the qrp-lite trace format.

A derivation is a list of steps (axiom / resolve / reduce). The checker
recomputes every clause from scratch: stored clause values are caches and
never trusted. Gluing turns a multi-round QCDCL proof into one derivation by
replacing axiom references to learned clauses with the steps that derived
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import IllegalTautologyError, PivotMissingError, QcdclError
from .formula import (
    Clause,
    LDQRES,
    MODES,
    QCNF,
    QRES,
    clause_from_raw,
    make_clause,
    reduce_clause,
    resolve_clauses,
)
from .trail import RED, Time, Trail, validate_trail

AXIOM = "a"
RESOLVE = "r"
REDUCE = "u"


@dataclass(frozen=True)
class ProofStep:
    step_id: int
    kind: str
    clause: Clause                 # cache; checkers recompute
    source: int | None = None      # axiom: clause id in the formula (if known)
    pivot: int | None = None       # resolve: pivot variable (positive)
    left: int | None = None
    right: int | None = None
    src: int | None = None         # reduce: premise step id


@dataclass
class Derivation:
    steps: list[ProofStep]
    mode: str
    conclusion: int

    def conclusion_clause(self) -> Clause:
        return self.step(self.conclusion).clause

    def step(self, step_id: int) -> ProofStep:
        s = self._by_id.get(step_id)
        if s is None:
            raise KeyError(f"no step {step_id}")
        return s

    @property
    def _by_id(self):
        cache = getattr(self, "_id_cache", None)
        if cache is None or len(cache) != len(self.steps):
            cache = {s.step_id: s for s in self.steps}
            self._id_cache = cache
        return cache

    def __len__(self):
        return len(self.steps)


@dataclass
class Verdict:
    valid: bool
    failures: list[tuple[int, str]] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def clause_key(c: Clause, prefix) -> tuple:
    """Canonical identity of a clause under a prefix (order-insensitive)."""
    order = lambda v: (prefix.level(v), v)
    return (
        tuple(sorted(c.lits, key=lambda l: order(abs(l)))),
        tuple(sorted(c.merged, key=order)),
    )


def check_derivation(qcnf: QCNF, d: Derivation, mode: str | None = None,
                     require_refutation: bool = False) -> Verdict:
    """Re-derive every step and validate its rule's side conditions.

    Axioms must match a clause of the formula (set equality of literals).
    Premises must precede their use. With ``require_refutation`` the
    conclusion must be the empty clause.
    """
    mode = mode or d.mode
    if mode not in MODES:
        return Verdict(False, [(-1, f"unknown mode {mode!r}")])
    failures: list[tuple[int, str]] = []
    known = {clause_key(c, qcnf.prefix): cid for cid, c in enumerate(qcnf.clauses)}
    computed: dict[int, Clause] = {}
    seen_ids: set[int] = set()
    for s in d.steps:
        if s.step_id in seen_ids:
            failures.append((s.step_id, "duplicate step id"))
            continue
        seen_ids.add(s.step_id)
        if s.kind == AXIOM:
            # Learned long-distance clauses may be tautological and still act
            # as premises of later rounds; membership in the formula's clause
            # list is the criterion (matrix clauses are never tautological).
            try:
                normal = make_clause(qcnf.prefix, s.clause.all_literals())
            except ValueError as exc:
                failures.append((s.step_id, f"axiom: {exc}"))
                continue
            if clause_key(normal, qcnf.prefix) not in known:
                failures.append((s.step_id, "axiom not among the formula's clauses"))
                continue
            computed[s.step_id] = normal
        elif s.kind == RESOLVE:
            if s.left not in computed or s.right not in computed:
                failures.append((s.step_id, "resolve premise missing or later"))
                continue
            left, right = computed[s.left], computed[s.right]
            if s.pivot is None or s.pivot <= 0:
                failures.append((s.step_id, "resolve step without pivot variable"))
                continue
            if s.pivot in left.lits:
                pivot_lit = s.pivot
            elif -s.pivot in left.lits:
                pivot_lit = -s.pivot
            else:
                failures.append((s.step_id, f"pivot {s.pivot} missing from left premise"))
                continue
            try:
                computed[s.step_id] = resolve_clauses(
                    left, right, pivot_lit, mode, qcnf.prefix
                )
            except (IllegalTautologyError, PivotMissingError) as exc:
                failures.append((s.step_id, str(exc)))
                continue
        elif s.kind == REDUCE:
            if s.src not in computed:
                failures.append((s.step_id, "reduce premise missing or later"))
                continue
            computed[s.step_id] = reduce_clause(computed[s.src], qcnf.prefix)
        else:
            failures.append((s.step_id, f"unknown step kind {s.kind!r}"))
    if d.conclusion not in computed:
        failures.append((d.conclusion, "conclusion step missing or invalid"))
    elif d.steps and d.steps[-1].step_id != d.conclusion:
        failures.append((d.conclusion, "conclusion is not the last step"))
    if require_refutation and computed.get(d.conclusion) is not None:
        if not computed[d.conclusion].is_empty():
            failures.append((d.conclusion, "refutation does not end in the empty clause"))
    return Verdict(not failures, failures)


def count_reductions(d: Derivation) -> int:
    return sum(1 for s in d.steps if s.kind == REDUCE)


# -- QCDCL proofs -----------------------------------------------------------


@dataclass
class Round:
    """One conflict/learn/backtrack cycle of a QCDCL run.

    ``backtrack`` names the agreement time with the previous round's trail
    (restarts use (0, 0); the first round always carries (0, 0)).
    """

    trail: Trail
    learned: Clause
    clause_id: int
    derivation: Derivation
    backtrack: Time
    picked_index: int
    duplicate: bool = False


@dataclass
class QcdclProof:
    rounds: list[Round]
    decision_policy: str
    propagation_policy: str

    @property
    def conclusion(self) -> Clause:
        return self.rounds[-1].learned

    def is_refutation(self) -> bool:
        return bool(self.rounds) and self.conclusion.is_empty()

    @property
    def size(self) -> int:
        """Total trail length; the conflict marker counts as one element."""
        return sum(len(r.trail) for r in self.rounds)

    def learned_clauses(self) -> list[Clause]:
        return [r.learned for r in self.rounds]


def glue_qcdcl_proof(qcnf: QCNF, proof: QcdclProof) -> Derivation:
    """Stick the per-round derivations together into one derivation.

    Axiom steps that reference a learned clause are replaced by the step
    that concluded it in an earlier round; matrix axioms are deduplicated.
    The result derives the last learned clause from the matrix alone.
    """
    mode = LDQRES if proof.propagation_policy == RED else QRES
    out: list[ProofStep] = []
    next_id = 0
    matrix_axiom: dict[int, int] = {}
    learned_to_step: dict[int, int] = {}

    def emit(step: ProofStep) -> int:
        nonlocal next_id
        out.append(step)
        next_id += 1
        return next_id - 1

    for rnd in proof.rounds:
        local_to_global: dict[int, int] = {}
        for s in rnd.derivation.steps:
            if s.kind == AXIOM and s.source is not None and s.source in learned_to_step:
                local_to_global[s.step_id] = learned_to_step[s.source]
                continue
            if s.kind == AXIOM and s.source is not None and s.source in matrix_axiom:
                local_to_global[s.step_id] = matrix_axiom[s.source]
                continue
            if s.kind == AXIOM:
                gid = emit(ProofStep(next_id, AXIOM, s.clause, source=s.source))
                if s.source is not None:
                    matrix_axiom[s.source] = gid
            elif s.kind == RESOLVE:
                gid = emit(
                    ProofStep(
                        next_id,
                        RESOLVE,
                        s.clause,
                        pivot=s.pivot,
                        left=local_to_global[s.left],
                        right=local_to_global[s.right],
                    )
                )
            else:
                gid = emit(ProofStep(next_id, REDUCE, s.clause, src=local_to_global[s.src]))
            local_to_global[s.step_id] = gid
        learned_to_step[rnd.clause_id] = local_to_global[rnd.derivation.conclusion]
    return Derivation(out, mode, learned_to_step[proof.rounds[-1].clause_id])


def validate_qcdcl_proof(base: QCNF, proof: QcdclProof) -> list[str]:
    """Re-check every round of a QCDCL proof against the base formula.

    Verifies trail conditions (with naturality enforced beyond each round's
    backtrack point), agreement between consecutive trails, membership of
    the learned clause in the conflict-analysis sequence, the per-round
    derivations, and clause id bookkeeping.
    """
    from .learning import learnable_sequence  # cycle guard

    problems: list[str] = []
    work = base.copy()
    seen = {clause_key(c, work.prefix) for c in work.clauses}
    prev_trail: Trail | None = None
    for idx, rnd in enumerate(proof.rounds):
        tag = f"round {idx}"
        trail = rnd.trail
        if (
            trail.decision_policy != proof.decision_policy
            or trail.propagation_policy != proof.propagation_policy
        ):
            problems.append(f"{tag}: trail policies differ from the proof's")
        if not trail.conflicted:
            problems.append(f"{tag}: trail has no conflict")
            break
        if idx == 0:
            if rnd.backtrack != (0, 0):
                problems.append(f"{tag}: first round must start from scratch")
            natural_from = 0
        else:
            try:
                pos = trail.position_of_time(rnd.backtrack)
                prev_pos = prev_trail.position_of_time(rnd.backtrack)
            except QcdclError:
                problems.append(f"{tag}: backtrack time {rnd.backtrack} invalid")
                break
            if trail.entries[: pos + 1] != prev_trail.entries[: prev_pos + 1]:
                problems.append(f"{tag}: trail disagrees with predecessor before backtrack point")
            natural_from = pos + 1
        problems += [f"{tag}: {p}" for p in validate_trail(work, trail, natural_from)]
        seq = learnable_sequence(trail, work)
        if not (0 <= rnd.picked_index < len(seq.elements)):
            problems.append(f"{tag}: picked index {rnd.picked_index} out of range")
        elif clause_key(seq.elements[rnd.picked_index], work.prefix) != clause_key(
            rnd.learned, work.prefix
        ):
            problems.append(f"{tag}: learned clause is not the recorded sequence element")
        verdict = check_derivation(work, rnd.derivation)
        if not verdict:
            problems.append(f"{tag}: derivation invalid: {verdict.failures[:3]}")
        elif clause_key(
            rnd.derivation.conclusion_clause(), work.prefix
        ) != clause_key(rnd.learned, work.prefix):
            problems.append(f"{tag}: derivation does not conclude the learned clause")
        if rnd.clause_id != len(work.clauses):
            problems.append(f"{tag}: clause id {rnd.clause_id} out of sequence")
        dup = clause_key(rnd.learned, work.prefix) in seen
        if dup != rnd.duplicate:
            problems.append(f"{tag}: duplicate flag wrong")
        seen.add(clause_key(rnd.learned, work.prefix))
        work.add_clause(rnd.learned)
        prev_trail = trail
    return problems


# -- trace format -----------------------------------------------------------


def serialize_proof(d: Derivation) -> str:
    lines = [f"p qrp-lite {d.mode}"]
    for s in d.steps:
        if s.kind == AXIOM:
            fields = ["a", str(s.step_id), *map(str, s.clause.all_literals()), "0"]
            lines.append(" ".join(fields))
        elif s.kind == RESOLVE:
            lines.append(f"r {s.step_id} {s.pivot} {s.left} {s.right} 0")
        else:
            lines.append(f"u {s.step_id} {s.src} 0")
    lines.append(f"conclusion {d.conclusion}")
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> Derivation:
    """Parse a qrp-lite trace.

    Axiom literals keep their file identity (re-normalization against a
    prefix happens inside the checker). Derived steps carry no literals;
    their clauses are computed on demand by the checker, so the cached
    clause here is a placeholder.
    """
    steps: list[ProofStep] = []
    mode = None
    conclusion = None
    ids: set[int] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c "):
            continue
        fields = line.split()
        if fields[0] == "p":
            if fields[1:] != ["qrp-lite", QRES] and fields[1:] != ["qrp-lite", LDQRES]:
                raise QcdclError(f"line {line_no}: bad header {line!r}")
            mode = fields[2]
            continue
        if fields[0] == "conclusion":
            conclusion = int(fields[1])
            continue
        kind = fields[0]
        try:
            nums = [int(f) for f in fields[1:]]
        except ValueError:
            raise QcdclError(f"line {line_no}: non-integer token") from None
        if not nums or (kind != "conclusion" and nums[-1] != 0):
            raise QcdclError(f"line {line_no}: missing terminating 0")
        nums = nums[:-1]
        if kind == AXIOM:
            steps.append(ProofStep(nums[0], AXIOM, clause_from_raw(nums[1:])))
        elif kind == RESOLVE:
            if len(nums) != 4:
                raise QcdclError(f"line {line_no}: resolve needs pivot, left, right")
            sid, pivot, left, right = nums
            if left not in ids or right not in ids:
                raise QcdclError(f"line {line_no}: dangling premise id")
            steps.append(ProofStep(sid, RESOLVE, Clause(), pivot=pivot, left=left, right=right))
        elif kind == REDUCE:
            if len(nums) != 2:
                raise QcdclError(f"line {line_no}: reduce needs a source id")
            sid, src = nums
            if src not in ids:
                raise QcdclError(f"line {line_no}: dangling premise id")
            steps.append(ProofStep(sid, REDUCE, Clause(), src=src))
        else:
            raise QcdclError(f"line {line_no}: unknown record {kind!r}")
        ids.add(steps[-1].step_id)
    if mode is None:
        raise QcdclError("missing 'p qrp-lite' header")
    if conclusion is None:
        raise QcdclError("missing conclusion record")
    if conclusion not in ids:
        raise QcdclError("conclusion references a missing step")
    return Derivation(steps, mode, conclusion)
