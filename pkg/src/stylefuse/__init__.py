"""Training-free outfit completion engine.

Two stages: a multimodal LLM turns a partial outfit into a structured
aesthetic profile and a target-item description; a deterministic fusion
step turns those plus the outfit images into one query vector, which is
matched against the catalog by exact cosine similarity.
"""

__version__ = "0.1.0"

from stylefuse import errors
from stylefuse.fusion import FusionConfig, QueryVector, build_query

__all__ = ["errors", "FusionConfig", "QueryVector", "build_query", "__version__"]
