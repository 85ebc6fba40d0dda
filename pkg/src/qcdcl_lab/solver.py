"""The end-to-end solving loop: natural trails, learning, backtracking.

Decisions are the only free choice; propagation and conflicts are forced.
The default heuristic picks the lowest admissible variable, positive
polarity first. Two situations make the deterministic loop spin in place: a
trail that assigns every variable without conflicting, and a round whose
learned clause already exists. Both bump a polarity counter whose bits flip
the preferred polarity per decision depth, and force a restart, so the loop
systematically explores different branches while staying reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .formula import QCNF
from .learning import (
    ASSERTING,
    LearningScheme,
    Picked,
    learnable_sequence,
    pick_learned,
)
from .proofs import QcdclProof, Round, clause_key
from .trail import (
    DECISION_POLICIES,
    PROPAGATION_POLICIES,
    Trail,
    legal_decisions,
    propagate_to_fixpoint,
)

REFUTED = "refuted"
BUDGET_EXHAUSTED = "budget-exhausted"
SATURATED = "saturated-no-conflict"


@dataclass
class SolverConfig:
    decision_policy: str
    propagation_policy: str
    scheme: LearningScheme = ASSERTING
    heuristic: str = "fixed"      # "fixed" | "random"
    seed: int = 0
    max_conflicts: int = 100_000
    saturation_budget: int | None = None   # default: 2**min(vars, 16)

    def __post_init__(self):
        if self.decision_policy not in DECISION_POLICIES:
            raise ValueError(f"unknown decision policy {self.decision_policy!r}")
        if self.propagation_policy not in PROPAGATION_POLICIES:
            raise ValueError(f"unknown propagation policy {self.propagation_policy!r}")
        if self.heuristic not in ("fixed", "random"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.max_conflicts < 1:
            raise ValueError("conflict budget must be at least 1")


@dataclass
class SolveResult:
    status: str
    proof: QcdclProof | None
    stats: dict = field(default_factory=dict)

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED


def _pick_decision(trail, qcnf, cfg, flip_counter, rng):
    legal = legal_decisions(trail, qcnf, cfg.decision_policy)
    if not legal:
        return None
    if cfg.heuristic == "random":
        return rng.choice(sorted(legal))
    # Minimal (level, id) legal variable: prefix-order exploration is legal
    # under every decision policy and, combined with the polarity counter,
    # guarantees a conflicting branch is reached on false inputs.
    prefix = qcnf.prefix
    var = min({abs(l) for l in legal}, key=lambda v: (prefix.level(v), v))
    depth = len(trail.decisions())
    negative = (flip_counter >> depth) & 1
    want = -var if negative else var
    return want if want in legal else -want


def solve(qcnf: QCNF, cfg: SolverConfig) -> SolveResult:
    work = qcnf.copy()
    rng = random.Random(cfg.seed)
    seen = {clause_key(c, work.prefix) for c in work.clauses}
    rounds: list[Round] = []
    flip_counter = 0
    saturations_total = 0
    saturation_streak = 0
    nvars = work.num_vars
    saturation_budget = cfg.saturation_budget or 2 ** min(nvars, 16)

    def stats(extra=None):
        out = {
            "conflicts": len(rounds),
            "saturations": saturations_total,
            "iota_size": sum(len(r.trail) for r in rounds),
        }
        out.update(extra or {})
        return out

    trail = Trail(cfg.decision_policy, cfg.propagation_policy)
    start_time = (0, 0)
    while True:
        propagate_to_fixpoint(work, trail)
        if not trail.conflicted:
            lit = _pick_decision(trail, work, cfg, flip_counter, rng)
            if lit is not None:
                trail.append_decision(lit)
                continue
            # Saturated: every variable assigned, nothing falsified.
            saturations_total += 1
            saturation_streak += 1
            flip_counter += 1
            if saturation_streak >= saturation_budget:
                return SolveResult(SATURATED, None, stats())
            trail = Trail(cfg.decision_policy, cfg.propagation_policy)
            start_time = (0, 0)
            continue

        saturation_streak = 0
        seq = learnable_sequence(trail, work)
        picked: Picked = pick_learned(cfg.scheme, seq, trail, work)
        duplicate = clause_key(picked.clause, work.prefix) in seen
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
        seen.add(clause_key(picked.clause, work.prefix))
        work.add_clause(picked.clause)
        if picked.clause.is_empty():
            proof = QcdclProof(rounds, cfg.decision_policy, cfg.propagation_policy)
            return SolveResult(REFUTED, proof, stats())
        if len(rounds) >= cfg.max_conflicts:
            return SolveResult(BUDGET_EXHAUSTED, None, stats())
        if duplicate:
            flip_counter += 1
            start_time = (0, 0)
            trail = Trail(cfg.decision_policy, cfg.propagation_policy)
        else:
            start_time = picked.time
            trail = rounds[-1].trail.backtrack(picked.time)
