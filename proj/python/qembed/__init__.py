"""Quantum-embedding binding energies: DMET with a VQE fragment solver."""

import json as _json

from ._qembed import (
    QembedError,
    __version__,
    analyze_fixture,
    binding_energy,
    discrimination_stats,
    fci_energy,
    oracle_checks,
    qubit_hamiltonian,
    rank_and_correlate,
    rhf,
    run_config,
    vqe_energy,
    yxxx_statevector,
)


def run(path):
    """Run a config file and return the parsed report."""
    return _json.loads(run_config(str(path)))


__all__ = [
    "QembedError",
    "analyze_fixture",
    "binding_energy",
    "discrimination_stats",
    "fci_energy",
    "oracle_checks",
    "qubit_hamiltonian",
    "rank_and_correlate",
    "rhf",
    "run",
    "run_config",
    "vqe_energy",
    "yxxx_statevector",
]
