"""HTTP service surface: pydantic schemas, request handlers, FastAPI app.

The handlers are plain functions over the schema types; the CLI calls them
in-process by default and over HTTP when pointed at a running server.
"""

from .app import create_app
from .schemas import RunOptions, RunReport, RunRequest

__all__ = ["create_app", "RunOptions", "RunReport", "RunRequest"]
