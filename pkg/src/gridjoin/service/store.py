"""In-memory dataset registry backing the HTTP service.

Entries are immutable column containers keyed by name; uploads replace
existing entries wholesale. All mutation happens under one lock, and the
stored containers are frozen, so join handlers can read them without
holding it.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from ..columnar import FeatureColumns, PointColumns
from ..errors import UsageError


class DatasetNotFound(LookupError):
    pass


@dataclass(frozen=True)
class StoredDataset:
    name: str
    points: PointColumns | None = None
    features: FeatureColumns | None = None

    @property
    def kind(self) -> str:
        return "points" if self.points is not None else self.features.kind

    def info(self) -> dict:
        if self.points is not None:
            return {"name": self.name, "kind": self.kind, "count": self.points.count}
        return {
            "name": self.name,
            "kind": self.kind,
            "count": self.features.feature_count,
            "vertex_count": self.features.vertex_count,
        }


class DatasetStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, StoredDataset] = {}

    def put_points(self, name: str, points: PointColumns) -> StoredDataset:
        entry = StoredDataset(name=name, points=points)
        with self._lock:
            self._entries[name] = entry
        return entry

    def put_features(self, name: str, features: FeatureColumns) -> StoredDataset:
        entry = StoredDataset(name=name, features=features)
        with self._lock:
            self._entries[name] = entry
        return entry

    def get(self, name: str) -> StoredDataset:
        with self._lock:
            entry = self._entries.get(name)
        if entry is None:
            raise DatasetNotFound(f"no dataset named {name!r}")
        return entry

    def get_points(self, name: str) -> PointColumns:
        entry = self.get(name)
        if entry.points is None:
            raise UsageError(f"dataset {name!r} holds {entry.kind} features, not points")
        return entry.points

    def get_features(self, name: str, kind: str) -> FeatureColumns:
        entry = self.get(name)
        if entry.features is None or entry.features.kind != kind:
            raise UsageError(f"dataset {name!r} holds {entry.kind}, expected {kind}")
        return entry.features

    def delete(self, name: str) -> None:
        with self._lock:
            if name not in self._entries:
                raise DatasetNotFound(f"no dataset named {name!r}")
            del self._entries[name]

    def list(self) -> list[dict]:
        with self._lock:
            entries = sorted(self._entries.values(), key=lambda e: e.name)
        return [e.info() for e in entries]
