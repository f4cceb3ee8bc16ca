"""Catalog ingest: binary embedding files, manifests, question sets."""

from stylefuse.datastore.aemb import read_embeddings, write_embeddings
from stylefuse.datastore.catalog import Catalog, Item, candidate_pool, load_catalog
from stylefuse.datastore.manifest import (
    A100Question,
    CirQuery,
    FitbQuestion,
    load_a100_questions,
    load_cir_queries,
    load_fitb_questions,
    load_manifest,
)

__all__ = [
    "A100Question",
    "Catalog",
    "CirQuery",
    "FitbQuestion",
    "Item",
    "candidate_pool",
    "load_a100_questions",
    "load_catalog",
    "load_cir_queries",
    "load_fitb_questions",
    "load_manifest",
    "read_embeddings",
    "write_embeddings",
]
