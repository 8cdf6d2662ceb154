"""Content-addressed JSON cache: cache/<algebra-hash>/<op>_n<k>_p<prime>.json."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .algebra import AlgebraSpec

CACHE_VERSION = 1
ENV_VAR = "PI_CODIM_CACHE"


def default_cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR, "cache"))


class ResultCache:
    def __init__(self, root=None, force: bool = False):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.force = force  # ignore existing entries, still write fresh ones

    def path(self, A: AlgebraSpec, key: dict) -> Path:
        params = "_".join(f"{k}{key[k]}" for k in sorted(key) if k != "op")
        return self.root / A.digest() / f"{key['op']}_{params}.json"

    def get(self, A: AlgebraSpec, key: dict):
        if self.force:
            return None
        path = self.path(A, key)
        try:
            with open(path) as fh:
                entry = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if entry.get("version") != CACHE_VERSION or entry.get("key") != key:
            return None
        return entry["payload"]

    def put(self, A: AlgebraSpec, key: dict, payload: dict) -> Path:
        path = self.path(A, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"version": CACHE_VERSION, "algebra": A.digest(), "key": key,
                 "seed": payload.get("seeds"), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(entry, fh, indent=1, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return path
