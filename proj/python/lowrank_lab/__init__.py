"""Singular-value decay measurements and certified tail bounds for
Kronecker-structured linear systems and eigenvalue problems."""

import json as _json

try:
    from ._lowrank_lab import *  # installed layout: lowrank_lab/_lowrank_lab.so
    from . import _lowrank_lab as _impl
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from _lowrank_lab import *  # noqa: F401,F403
    import _lowrank_lab as _impl

__version__ = _impl.__version__


def run_experiment(config, out_dir=None, jobs=1):
    """Run one experiment cell and return the report as a dict.

    ``config`` is a dict or a JSON string following the CLI config schema;
    ``out_dir`` additionally writes the JSON/CSV report files.
    """
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_impl.run_experiment_json(config, out_dir or "", jobs))
