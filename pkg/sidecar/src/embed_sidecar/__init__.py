"""Embedding sidecar: catalog export to AEMB plus an embedding HTTP service.

Standalone by design — it talks to the engine only through the AEMB byte
format and the documented HTTP endpoints, never through imports.
"""

__version__ = "0.1.0"
