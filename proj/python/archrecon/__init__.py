"""Python bindings for the archrecon reconstruction engine."""

import json
import os

from . import _archrecon
from ._archrecon import (
    OBJECTIVES,
    ContractViolation,
    NotFoundError,
    ParseError,
    PinConflictError,
    additive_epsilon,
    generational_distance,
    hypervolume,
    inverted_generational_distance,
    kruskal_wallis,
    nondominated_filter,
    spacing,
)

__all__ = [
    "OBJECTIVES",
    "ContractViolation",
    "NotFoundError",
    "ParseError",
    "PinConflictError",
    "additive_epsilon",
    "evaluate",
    "generational_distance",
    "hypervolume",
    "indicators",
    "inverted_generational_distance",
    "kruskal_wallis",
    "nondominated_filter",
    "run",
    "run_stored",
    "spacing",
    "synthetic_system",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def evaluate(graph, model, unit_to_package, package_to_layer, aggregation="mean"):
    """Objective vector of one assignment; graph and model are dicts or JSON text."""
    values = json.loads(
        _archrecon.evaluate(_text(graph), _text(model), list(unit_to_package), list(package_to_layer), aggregation)
    )
    return dict(zip(OBJECTIVES, values))


def synthetic_system(units, packages, layers, noise=0.05, seed=0):
    return json.loads(_archrecon.synthetic_system(units, packages, layers, noise, seed))


def run(request, base_dir="."):
    """Runs a request in memory and returns its front and snapshot summary."""
    return json.loads(_archrecon.run(_text(request), os.fspath(base_dir)))


def run_stored(request, store, base_dir="."):
    """Runs a request through a result store; returns the run id."""
    return _archrecon.run_stored(_text(request), os.fspath(base_dir), os.fspath(store))


def indicators(front, reference_inputs, input):
    return json.loads(_archrecon.indicators(front, reference_inputs, input))
