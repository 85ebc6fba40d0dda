"""Shared helpers: tiny formulas from the docs plus solver cross-checks."""

from __future__ import annotations

import random

import pytest

from qcdcl_lab import (
    NO_RED,
    QCNF,
    check_derivation,
    glue_qcdcl_proof,
    parse_qdimacs,
    validate_qcdcl_proof,
)
from qcdcl_lab.formula import EXISTS, FORALL, Prefix, make_clause

# The one-alternation example used throughout: variables x=1, u=2, y=3, z=4.
EXAMPLE_PHI = """p cnf 4 4
e 1 0
a 2 0
e 3 4 0
1 2 3 0
-3 0
-1 4 0
-1 -4 0
"""

# True two-clause formula over one universal and one dependent existential.
PSI_TRUE = """p cnf 2 2
a 1 0
e 2 0
1 -2 0
-1 2 0
"""

# False single-universal formula: all four polarity combinations.
ALL_PAIRS_FALSE = """p cnf 2 4
a 1 0
e 2 0
1 2 0
1 -2 0
-1 2 0
-1 -2 0
"""


@pytest.fixture
def example_phi() -> QCNF:
    return parse_qdimacs(EXAMPLE_PHI)


@pytest.fixture
def psi_true() -> QCNF:
    return parse_qdimacs(PSI_TRUE)


def random_small_qcnf(rng: random.Random, max_vars=8, max_clauses=12) -> QCNF:
    """Small random prenex instance; clauses are non-tautological by
    construction and every variable is bound."""
    nvars = rng.randint(2, max_vars)
    variables = list(range(1, nvars + 1))
    rng.shuffle(variables)
    blocks = []
    i = 0
    quant = rng.choice((EXISTS, FORALL))
    while i < len(variables):
        width = rng.randint(1, max(1, min(3, len(variables) - i)))
        blocks.append((quant, variables[i:i + width]))
        quant = EXISTS if quant == FORALL else FORALL
        i += width
    prefix = Prefix(blocks)
    if not any(prefix.is_existential(v) for v in variables):
        blocks[-1] = (EXISTS, blocks[-1][1])
        prefix = Prefix(blocks)
    clauses = []
    for _ in range(rng.randint(2, max_clauses)):
        width = rng.randint(1, min(4, len(variables)))
        chosen = rng.sample(variables, width)
        clauses.append(make_clause(prefix, [v * rng.choice((1, -1)) for v in chosen]))
    return QCNF(prefix, clauses)


def check_refutation(qcnf: QCNF, proof) -> None:
    """Full post-conditions on a produced refutation: round validation,
    gluing, and the mode-specific tautology discipline."""
    assert proof.is_refutation()
    problems = validate_qcdcl_proof(qcnf, proof)
    assert not problems, problems[:5]
    glued = glue_qcdcl_proof(qcnf, proof)
    verdict = check_derivation(qcnf, glued, require_refutation=True)
    assert verdict, verdict.failures[:5]
    if proof.propagation_policy == NO_RED:
        assert glued.mode == "qres"
        assert all(not s.clause.merged for s in glued.steps)
        strict = check_derivation(qcnf, glued, mode="qres", require_refutation=True)
        assert strict, strict.failures[:5]


ALL_POLICY_PAIRS = [
    (d, r)
    for d in ("lev-ord", "ass-ord", "ass-r-ord", "any-ord")
    for r in ("red", "no-red")
    if (d, r) not in (("ass-ord", "red"), ("ass-r-ord", "no-red"))
]
