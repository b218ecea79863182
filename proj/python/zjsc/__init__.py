"""Tooling for <zjs-component> fragment pages: parsing, flattening,
dependency graphs and lifecycle scenarios."""

from ._core import (
    CycleError,
    DepthExceeded,
    EncodingError,
    FetchError,
    LocatorError,
    Resolver,
    ScenarioError,
    ZjscError,
    build_graph,
    canonicalize,
    component_specs,
    detect_cycles,
    flatten,
    format_graph,
    method_table,
    normalize,
    parse_fragment,
    run_scenario,
    scan_script,
)

__all__ = [
    "CycleError",
    "DepthExceeded",
    "EncodingError",
    "FetchError",
    "LocatorError",
    "Resolver",
    "ScenarioError",
    "ZjscError",
    "build_graph",
    "canonicalize",
    "component_specs",
    "detect_cycles",
    "flatten",
    "format_graph",
    "method_table",
    "normalize",
    "parse_fragment",
    "run_scenario",
    "scan_script",
]
