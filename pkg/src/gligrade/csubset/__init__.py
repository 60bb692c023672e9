"""A restricted C subset: enough language for course-scale loop exercises.

One `int main(void)` function; int scalars and fixed-size 1-D int arrays;
assignment, if/else, while, for, printf with %d, scanf of one int, return.
Programs are interpreted, never compiled: grading stays hermetic and
deterministic, and a compile step is simulated by parse/analysis errors.
"""

from .nodes import Program
from .parser import CSyntaxError, UndeclaredVariable, parse_program
from .interpreter import (
    CaseResult,
    CRuntimeError,
    ExecutionResult,
    StepBudgetExceeded,
    DEFAULT_STEP_BUDGET,
    interpret,
    normalize_output,
    run_tests,
)
from .template import TemplateIssue, TemplateMalformed, check_template_respect
from .convert import UnconvertibleGuard, guard_to_expression

__all__ = [
    "Program",
    "CSyntaxError",
    "UndeclaredVariable",
    "parse_program",
    "CaseResult",
    "CRuntimeError",
    "ExecutionResult",
    "StepBudgetExceeded",
    "DEFAULT_STEP_BUDGET",
    "interpret",
    "normalize_output",
    "run_tests",
    "TemplateIssue",
    "TemplateMalformed",
    "check_template_respect",
    "UnconvertibleGuard",
    "guard_to_expression",
]
