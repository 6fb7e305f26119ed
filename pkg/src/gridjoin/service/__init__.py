"""HTTP service wrapping the spatial-join engine."""
from .app import create_app
from .store import DatasetNotFound, DatasetStore

__all__ = ["create_app", "DatasetNotFound", "DatasetStore"]
