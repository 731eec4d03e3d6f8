"""FastAPI service exposing the analysis toolkit over HTTP."""

from .app import app

__all__ = ["app"]
