"""Enumeration and isomorphism classification of totally symmetric quasigroups."""
from .core import (
    CayleyTable,
    PropertyFlags,
    TripleSystem,
    derived_addition,
    from_triples,
    is_associative,
    is_elementary_abelian_2,
    is_idempotent,
    is_latin,
    is_medial,
    is_totally_symmetric,
    is_unipotent,
    to_triples,
)
from .pipeline import OrderSummary, bruteforce_order, enumerate_order

__all__ = [
    "CayleyTable",
    "OrderSummary",
    "PropertyFlags",
    "TripleSystem",
    "bruteforce_order",
    "derived_addition",
    "enumerate_order",
    "from_triples",
    "is_associative",
    "is_elementary_abelian_2",
    "is_idempotent",
    "is_latin",
    "is_medial",
    "is_totally_symmetric",
    "is_unipotent",
    "to_triples",
]
