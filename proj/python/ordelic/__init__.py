"""Lipschitz surrogates for orderable discrete properties, with calibration audits."""

import json

from . import _ordelic
from ._ordelic import OrdelicError, Surrogate, level_set_grid, lipschitz_estimate, refinement_check

__all__ = [
    "OrdelicError",
    "Surrogate",
    "audit",
    "construct",
    "counterexample",
    "level_set_grid",
    "lipschitz_estimate",
    "load_surrogate",
    "refinement_check",
    "simulate",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def construct(spec, algo="normals", phi=None, outer_slope=None, seed=0):
    """Build a surrogate from a property spec (dict or JSON text).

    Returns (surrogate, details) where details holds the construction diagnostics.
    """
    surrogate, details = _ordelic.construct(_text(spec), algo, phi, outer_slope, seed)
    return surrogate, json.loads(details)


def load_surrogate(path):
    with open(path) as f:
        return Surrogate.from_json(f.read())


def simulate(scenario, rows, seed=0):
    """Returns (rows as [(x_id, y)], predictor dict)."""
    csv_text, predictor = _ordelic.simulate(_text(scenario), rows, seed)
    lines = csv_text.strip().splitlines()[1:]
    data = [(x, int(y)) for x, y in (line.rsplit(",", 1) for line in lines)]
    return data, json.loads(predictor)


def audit(surrogate, predictor, scenario=None, rows=None, norm="l2", bin_width=None,
          marginal_lipschitz=None):
    """Audit a predictor against an exact scenario population or labelled rows."""
    if (scenario is None) == (rows is None):
        raise ValueError("pass exactly one of scenario or rows")
    csv_text = ""
    if rows is not None:
        csv_text = "x_id,y\n" + "".join(f"{x},{y}\n" for x, y in rows)
    result = _ordelic.audit(surrogate, _text(predictor), "" if scenario is None else _text(scenario),
                            csv_text, norm, bin_width, marginal_lipschitz)
    return json.loads(result)


def counterexample(surrogate, constant, norm="l2", budget=20000, seed=0):
    return json.loads(_ordelic.counterexample(surrogate, constant, norm, budget, seed))
