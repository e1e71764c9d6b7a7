"""Dense density-operator toolkit for entanglement-locking experiments."""

import json as _json

from ._qlock import *  # noqa: F401,F403
from ._qlock import run_experiment_json as _run_experiment_json


def run_experiment(name, include_timing=False, **params):
    """Run a registered experiment and return its report as a dict."""
    text = _run_experiment_json(name, _json.dumps(params), include_timing)
    return _json.loads(text)
