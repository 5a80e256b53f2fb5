"""Workbench for two-dimensional languages built from self-assembling tiles.

The package splits along the natural seams of the subject: `grid` holds
lattice words and contour geometry, `tiling` holds tile systems and
bounded language enumeration, `compose` holds contour-restricted word
composition, `expr` the expression DSL, `equations` the bounded
fixed-point solver, `interact` data-bearing scenario validation, and
`cli` the command-line front door.
"""

from .grid import (
    Bounds,
    Budget,
    BudgetExhausted,
    Element,
    Selector,
    Word,
    contour,
    extreme_cells,
    format_word_text,
    hv_components,
    normalize,
    parse_word_text,
    render_ascii,
    select,
    translate,
    word_sort_key,
)
from .compose import (
    Restriction,
    compose_langs,
    compose_words,
    contact_elements,
    eval_restriction,
    format_restriction,
    parse_restriction,
    star,
)
from .tiling import (
    LanguageDiff,
    Nfa,
    Scenario,
    Tile,
    TileSystem,
    accepting,
    count_language,
    diff_against_language,
    enumerate_language,
    format_language_diff,
    format_tile_system,
    parse_tile_system,
    parse_two_color,
    project_to_nfa,
    scenario_valid,
    word_accepted,
)
from .expr import (
    EquationSystem,
    Expr,
    classify,
    eval_expr,
    format_expr,
    format_system,
    parse_expr,
    parse_system,
)
from .equations import (
    Solution,
    builtin_f02ac,
    builtin_squares,
    corpus_text,
    diff_languages,
    fixed_point_holds,
    solve,
)
from .interact import (
    DataModule,
    DataScenario,
    ValidationReport,
    builtin_protocol,
    check_cell,
    complete_scenario,
    format_report,
    format_scenario,
    parse_module_library,
    parse_scenario,
    validate_scenario,
)

__all__ = [
    "Bounds",
    "Budget",
    "BudgetExhausted",
    "DataModule",
    "DataScenario",
    "Element",
    "EquationSystem",
    "Expr",
    "LanguageDiff",
    "Nfa",
    "Restriction",
    "Scenario",
    "Selector",
    "Solution",
    "Tile",
    "TileSystem",
    "ValidationReport",
    "Word",
    "accepting",
    "builtin_f02ac",
    "builtin_protocol",
    "builtin_squares",
    "check_cell",
    "classify",
    "complete_scenario",
    "compose_langs",
    "compose_words",
    "contact_elements",
    "contour",
    "corpus_text",
    "count_language",
    "diff_against_language",
    "diff_languages",
    "enumerate_language",
    "eval_expr",
    "eval_restriction",
    "extreme_cells",
    "fixed_point_holds",
    "format_expr",
    "format_language_diff",
    "format_report",
    "format_restriction",
    "format_scenario",
    "format_system",
    "format_tile_system",
    "format_word_text",
    "hv_components",
    "normalize",
    "parse_expr",
    "parse_module_library",
    "parse_restriction",
    "parse_scenario",
    "parse_system",
    "parse_tile_system",
    "parse_two_color",
    "parse_word_text",
    "project_to_nfa",
    "render_ascii",
    "scenario_valid",
    "select",
    "solve",
    "star",
    "translate",
    "validate_scenario",
    "word_accepted",
    "word_sort_key",
]
