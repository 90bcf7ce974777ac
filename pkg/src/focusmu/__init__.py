"""Cyclic-proof prover and countermodel refuter for the alternation-free two-way modal mu-calculus."""
from .syntax import (Action, Context, Formula, FormulaError, ParseError, negate, negation_closed_context,
                     parse_formula, render, unfold, closure, is_alternation_free)
from .paritygames import ParityGame, solve, BACKEND

__version__ = "0.1.0"
