"""HTTP service layer (FastAPI app and its pydantic schemas)."""

from .app import create_app

__all__ = ["create_app"]
