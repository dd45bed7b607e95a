"""Boolean logic built from colliding glider streams in Conway's Life.

The package splits into five layers: :mod:`lifelogic.engine` steps the
automaton, :mod:`lifelogic.patterns` reads and transforms RLE patterns,
:mod:`lifelogic.components` assembles and certifies the gate fixtures,
:mod:`lifelogic.circuits` compiles Boolean expressions onto one lattice,
and :mod:`lifelogic.cli` fronts it all from the shell.
"""

from __future__ import annotations

from .circuits import (
    AdderSpec,
    AlignmentFailureError,
    And,
    Circuit,
    Expr,
    ExprSyntaxError,
    MissingVariableError,
    Not,
    Or,
    PlacedGate,
    PlacementConflictError,
    ResponseEstimate,
    Var,
    Xor,
    add,
    binarize,
    build_adder,
    compile,
    estimate_response,
    evaluate,
    evaluate_parallel,
    parse_expr,
    save_circuit,
)
from .components import (
    STREAM_PERIOD,
    CalibrationError,
    CollisionSpec,
    Component,
    GateTemplate,
    NoValidPlacementError,
    activate_input,
    build_and,
    build_not,
    build_or,
    calibrate,
    check_annihilation_alignment,
    classify_collision,
    evaluate_gate,
    gun_stream,
    probe_output,
    save_gate_fixture,
    stream_invariants,
    template_cells,
    transform_template,
)
from .engine import (
    Glider,
    PackedGrid,
    Stabilization,
    Universe,
    bounding_box,
    detect_stabilization,
    find_gliders,
    naive_step,
    population,
    residue,
    run,
    states,
    step,
)
from .patterns import (
    CATALOG_NAMES,
    CatalogError,
    Orientation,
    Pattern,
    PlacementError,
    RleError,
    catalog,
    emit_rle,
    fixture_dir,
    parse_rle,
    place,
    transform,
)

__version__ = "0.1.0"

__all__ = [
    "AdderSpec",
    "AlignmentFailureError",
    "And",
    "CATALOG_NAMES",
    "CalibrationError",
    "CatalogError",
    "Circuit",
    "CollisionSpec",
    "Component",
    "Expr",
    "ExprSyntaxError",
    "GateTemplate",
    "Glider",
    "MissingVariableError",
    "NoValidPlacementError",
    "Not",
    "Or",
    "Orientation",
    "PackedGrid",
    "Pattern",
    "PlacedGate",
    "PlacementConflictError",
    "PlacementError",
    "ResponseEstimate",
    "RleError",
    "STREAM_PERIOD",
    "Stabilization",
    "Universe",
    "Var",
    "Xor",
    "activate_input",
    "add",
    "binarize",
    "bounding_box",
    "build_adder",
    "build_and",
    "build_not",
    "build_or",
    "calibrate",
    "catalog",
    "check_annihilation_alignment",
    "classify_collision",
    "compile",
    "detect_stabilization",
    "emit_rle",
    "estimate_response",
    "evaluate",
    "evaluate_gate",
    "evaluate_parallel",
    "find_gliders",
    "fixture_dir",
    "gun_stream",
    "naive_step",
    "parse_expr",
    "parse_rle",
    "place",
    "population",
    "probe_output",
    "residue",
    "run",
    "save_circuit",
    "save_gate_fixture",
    "states",
    "step",
    "stream_invariants",
    "template_cells",
    "transform",
    "transform_template",
    "__version__",
]
