"""Desk-scale workbench for secret-disclosure protocols and their quantum analogues.

The package is organised around three layers:

* combinatorial and algebraic models (``boolfn``, ``algebra``, ``gardenhose``),
* classical protocols with exact enumeration verifiers (``protocols``),
* a dense statevector toolkit and quantum protocol compilers (``quantum``, ``nlqc``).

Everything is deterministic given explicit seeds, and every verifier sweeps its
full input/randomness space rather than sampling.
"""

from .errors import BudgetError, DomainError, ValidationError

__all__ = ["BudgetError", "DomainError", "ValidationError"]

__version__ = "0.1.0"
