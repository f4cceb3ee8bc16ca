"""HTTP API: catalog browsing, outfit completion with explanations, FITB scoring."""

from stylefuse.service.app import create_app

__all__ = ["create_app"]
