"""Core QBF data model and the two primitive inferences.

Literals are DIMACS-style integers: variables are positive ids, negation is
arithmetic negation. The conflict marker used in trails is 0; it never occurs
inside a clause. A clause may carry "merged" universal variables (both
polarities present, as created by long-distance resolution); a merged
variable is stored once in ``Clause.merged`` instead of as two literals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IllegalTautologyError, PivotMissingError

EXISTS = "e"
FORALL = "a"

QRES = "qres"
LDQRES = "ldqres"
MODES = (QRES, LDQRES)


class Prefix:
    """A prenex quantifier prefix with alternating blocks.

    Adjacent blocks of the same quantifier are united at construction, so
    block index == quantifier level (1-based).
    """

    def __init__(self, blocks):
        merged = []
        for quant, variables in blocks:
            if quant not in (EXISTS, FORALL):
                raise ValueError(f"unknown quantifier {quant!r}")
            variables = tuple(sorted(set(variables)))
            if not variables:
                continue
            if merged and merged[-1][0] == quant:
                merged[-1] = (quant, tuple(sorted(merged[-1][1] + variables)))
            else:
                merged.append((quant, variables))
        self.blocks = tuple(merged)
        self._level = {}
        self._quant = {}
        for idx, (quant, variables) in enumerate(self.blocks, start=1):
            for v in variables:
                if v in self._level:
                    raise ValueError(f"variable {v} occurs in two blocks")
                if v <= 0:
                    raise ValueError("variable ids must be positive")
                self._level[v] = idx
                self._quant[v] = quant

    @property
    def variables(self):
        return frozenset(self._level)

    @property
    def num_levels(self):
        return len(self.blocks)

    def level(self, var: int) -> int:
        return self._level[abs(var)]

    def quant(self, var: int) -> str:
        return self._quant[abs(var)]

    def is_existential(self, var: int) -> bool:
        return self._quant[abs(var)] == EXISTS

    def is_universal(self, var: int) -> bool:
        return self._quant[abs(var)] == FORALL

    def __contains__(self, var: int) -> bool:
        return abs(var) in self._level

    def __eq__(self, other):
        return isinstance(other, Prefix) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        parts = ["%s{%s}" % (q, ",".join(map(str, vs))) for q, vs in self.blocks]
        return "Prefix(%s)" % " ".join(parts)


@dataclass(frozen=True)
class Clause:
    """An immutable disjunction of literals.

    ``lits`` never contains two literals of the same variable; a universal
    variable occurring in both polarities lives in ``merged`` instead.
    Literal order is fixed at construction (sorted by quantifier level, then
    variable id) so serialized output is deterministic.
    """

    lits: tuple[int, ...] = ()
    merged: tuple[int, ...] = ()

    def is_empty(self) -> bool:
        return not self.lits and not self.merged

    def is_tautological(self) -> bool:
        return bool(self.merged)

    def __contains__(self, lit: int) -> bool:
        return lit in self.lits or abs(lit) in self.merged

    def variables(self) -> frozenset[int]:
        return frozenset(abs(l) for l in self.lits) | frozenset(self.merged)

    def width(self) -> int:
        return len(self.lits) + 2 * len(self.merged)

    def key(self):
        return (self.lits, self.merged)

    def all_literals(self):
        """Literals including both polarities of merged variables."""
        out = list(self.lits)
        for v in self.merged:
            out.extend((v, -v))
        return out

    def __repr__(self):
        parts = [str(l) for l in self.lits] + [f"{v}*" for v in self.merged]
        return "(" + " ".join(parts) + ")" if parts else "(empty)"


def make_clause(prefix: Prefix, lits, merged=()) -> Clause:
    """Normalize literals into a Clause sorted by (level, variable).

    Duplicate literals collapse. A variable appearing in both polarities is
    rejected unless it is universal and explicitly allowed via ``merged``;
    callers that may legally create universal merges (long-distance
    resolution) pass them through ``merged``.
    """
    pol: dict[int, set[int]] = {}
    for l in lits:
        if l == 0:
            raise ValueError("0 is not a literal")
        pol.setdefault(abs(l), set()).add(1 if l > 0 else -1)
    merged_vars = set(abs(v) for v in merged)
    plain = []
    for v, signs in pol.items():
        if len(signs) == 2:
            merged_vars.add(v)
        else:
            plain.append(v if 1 in signs else -v)
    for v in merged_vars:
        if v not in prefix:
            raise ValueError(f"variable {v} not bound by the prefix")
        if not prefix.is_universal(v):
            raise ValueError(f"existential variable {v} cannot be merged")
        if v in pol and len(pol[v]) == 1:
            plain = [l for l in plain if abs(l) != v]
    for l in plain:
        if abs(l) not in prefix:
            raise ValueError(f"variable {abs(l)} not bound by the prefix")
    order = lambda v: (prefix.level(v), v)
    return Clause(
        lits=tuple(sorted(plain, key=lambda l: order(abs(l)))),
        merged=tuple(sorted(merged_vars, key=order)),
    )


def clause_from_raw(lits) -> Clause:
    """Build a clause without a prefix (parsed proof traces).

    Sorted by variable id only; both polarities of a variable become a
    merged marker. Checking against a formula re-normalizes, so the
    different sort order is harmless.
    """
    pol: dict[int, set[int]] = {}
    for l in lits:
        pol.setdefault(abs(l), set()).add(1 if l > 0 else -1)
    plain, merged = [], []
    for v in sorted(pol):
        if len(pol[v]) == 2:
            merged.append(v)
        else:
            plain.append(v if 1 in pol[v] else -v)
    return Clause(lits=tuple(sorted(plain, key=abs)), merged=tuple(merged))


def reduce_clause(c: Clause, prefix: Prefix) -> Clause:
    """Universal reduction: drop universal literals (and merged variables)
    whose level exceeds the level of every existential literal in the clause.

    A clause without existential literals reduces to the empty clause.
    Idempotent, and never removes existential literals.
    """
    ex_levels = [prefix.level(l) for l in c.lits if prefix.is_existential(l)]
    if not ex_levels:
        return Clause()
    cut = max(ex_levels)
    lits = tuple(
        l for l in c.lits if prefix.is_existential(l) or prefix.level(l) <= cut
    )
    merged = tuple(v for v in c.merged if prefix.level(v) <= cut)
    return Clause(lits=lits, merged=merged)


def _polarities(c: Clause, var: int) -> frozenset[int]:
    if var in c.merged:
        return frozenset((1, -1))
    if var in c.lits:
        return frozenset((1,))
    if -var in c.lits:
        return frozenset((-1,))
    return frozenset()


def resolve_clauses(c1: Clause, c2: Clause, pivot: int, mode: str, prefix: Prefix) -> Clause:
    """Resolve ``c1`` (containing ``pivot``) with ``c2`` (containing the
    negation) over an existential pivot.

    QRES mode rejects any tautological resolvent. LDQRES mode still rejects
    existential tautologies but admits a universal merge u/-u provided the
    variable occurs on both sides and its level exceeds the pivot's level;
    merges already present in a single premise carry over unchecked.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    pv = abs(pivot)
    if not prefix.is_existential(pv):
        raise PivotMissingError(f"pivot variable {pv} is not existential")
    if pivot not in c1.lits or -pivot not in c2.lits:
        raise PivotMissingError(f"pivot {pivot} not present with both polarities")
    lits, merged = [], []
    for v in (c1.variables() | c2.variables()) - {pv}:
        signs = _polarities(c1, v) | _polarities(c2, v)
        if len(signs) == 1:
            lits.append(v if 1 in signs else -v)
            continue
        if mode == QRES or prefix.is_existential(v):
            raise IllegalTautologyError(
                f"resolvent tautological in variable {v} (mode {mode})"
            )
        both_sides = v in c1.variables() and v in c2.variables()
        if both_sides and prefix.level(v) <= prefix.level(pv):
            raise IllegalTautologyError(
                f"universal merge on {v} blocked: level {prefix.level(v)} "
                f"not greater than pivot level {prefix.level(pv)}"
            )
        merged.append(v)
    order = lambda v: (prefix.level(v), v)
    return Clause(
        lits=tuple(sorted(lits, key=lambda l: order(abs(l)))),
        merged=tuple(sorted(merged, key=order)),
    )


def assignment_from_literals(literals) -> dict[int, bool]:
    sigma: dict[int, bool] = {}
    for l in literals:
        v = abs(l)
        val = l > 0
        if sigma.get(v, val) != val:
            raise ValueError(f"tautological assignment on variable {v}")
        sigma[v] = val
    return sigma


def restrict_clause(c: Clause, assignment) -> Clause | None:
    """Restrict a clause by a partial assignment.

    Returns None when the clause is satisfied, otherwise the clause with all
    falsified literals removed. ``assignment`` maps variable -> bool; an
    iterable of literals is also accepted. A merged variable is satisfied by
    either polarity, so it survives restriction or satisfies the clause.
    """
    if not isinstance(assignment, dict):
        assignment = assignment_from_literals(assignment)
    for v in c.merged:
        if v in assignment:
            return None
    lits = []
    for l in c.lits:
        val = assignment.get(abs(l))
        if val is None:
            lits.append(l)
        elif val == (l > 0):
            return None
    return Clause(lits=tuple(lits), merged=c.merged)


class QCNF:
    """A prenex QCNF: prefix plus a clause list with stable ids.

    Indices into ``clauses`` are the clause ids used everywhere (trails,
    proofs). The first ``matrix_size`` entries are the original matrix;
    learned clauses are appended behind them.
    """

    def __init__(self, prefix: Prefix, clauses, matrix_size=None):
        self.prefix = prefix
        self.clauses: list[Clause] = list(clauses)
        self.matrix_size = len(self.clauses) if matrix_size is None else matrix_size
        for c in self.clauses[: self.matrix_size]:
            if c.is_tautological():
                raise ValueError("matrix clauses must be non-tautological")

    def add_clause(self, c: Clause) -> int:
        self.clauses.append(c)
        return len(self.clauses) - 1

    def copy(self) -> "QCNF":
        return QCNF(self.prefix, list(self.clauses), self.matrix_size)

    @property
    def num_vars(self) -> int:
        return len(self.prefix.variables)

    def matrix(self) -> list[Clause]:
        return self.clauses[: self.matrix_size]

    def __repr__(self):
        return f"QCNF({self.prefix!r}, {len(self.clauses)} clauses)"
