"""Multiparty entanglement accounting: LOCC ledgers, relative entropy of
entanglement brackets, GHZ / singlet rates and concentration yields."""

from ._core import (
    CapacityError,
    binary_entropy,
    concentrate,
    entropies,
    ghz_scan,
    random_protocol,
    rates,
    reduced_matrix,
    ree,
    relative_entropy,
    run,
    singlet_matching,
    state,
    von_neumann_entropy,
)

__all__ = [
    "CapacityError",
    "binary_entropy",
    "concentrate",
    "entropies",
    "ghz_scan",
    "random_protocol",
    "rates",
    "reduced_matrix",
    "ree",
    "relative_entropy",
    "run",
    "singlet_matching",
    "state",
    "von_neumann_entropy",
]
