"""Product-flow payment ledger: authenticated state, atomic payment batches and evidence."""

import json

from ._core import (
    AuthenticatedMap,
    ContentStore,
    FlowledgerError,
    __version__,
    cid_of,
    generate_dataset,
    render_report,
    run_matrix,
    run_scenario,
    sha256_hex,
    valuation,
    verify_proof,
    verify_run,
)


def scenario(dataset_json, scenario_id, asset="native"):
    """Run one scenario and return the payment dataset as a dict."""
    return json.loads(run_scenario(dataset_json, scenario_id, asset))


__all__ = [
    "AuthenticatedMap",
    "ContentStore",
    "FlowledgerError",
    "__version__",
    "cid_of",
    "generate_dataset",
    "render_report",
    "run_matrix",
    "run_scenario",
    "scenario",
    "sha256_hex",
    "valuation",
    "verify_proof",
    "verify_run",
]
