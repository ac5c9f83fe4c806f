"""Array directories: ``manifest.json`` plus raw little-endian float64 files.

Each array is written in C order as ``<name>.f64``; the manifest records its
shape, axis names and SHA-256 so readers can verify the content. Manifests
hold no timestamps, so identical inputs give byte-identical directories.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

DTYPE = "<f8"
MANIFEST = "manifest.json"

AXES = {
    "passive_x": ["time", "receiver", "source"],
    "passive_y": ["time", "test_point", "source"],
    "active": ["lag", "receiver", "test_point"],
    "incident": ["lag", "receiver", "test_point"],
    "kernel": ["lag", "receiver", "test_point"],
    "matrix": ["row", "column"],
    "map": ["y", "x"],
}


class ManifestError(RuntimeError):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _dump_json(obj, path):
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)


def write_array(directory, name: str, array) -> dict:
    arr = np.ascontiguousarray(array, dtype=DTYPE)
    path = Path(directory) / f"{name}.f64"
    tmp = path.with_suffix(".tmp")
    arr.tofile(tmp)
    os.replace(tmp, path)
    return {"file": path.name, "shape": list(arr.shape), "dtype": DTYPE,
            "axes": AXES.get(name), "sha256": sha256_file(path)}


def write_bundle(directory, arrays: dict, meta: dict, kind: str) -> Path:
    """Write arrays then the manifest (last, so its presence marks completion)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stale = directory / MANIFEST
    if stale.exists():
        stale.unlink()
    entries = {name: write_array(directory, name, arr) for name, arr in arrays.items()}
    _dump_json({"kind": kind, "format_version": 1, "arrays": entries, "meta": meta},
               directory / MANIFEST)
    return directory


def read_manifest(directory) -> dict:
    path = Path(directory) / MANIFEST
    if not path.exists():
        raise ManifestError(f"no manifest in {directory}")
    return json.loads(path.read_text())


def update_manifest(directory, **meta_updates):
    man = read_manifest(directory)
    man["meta"].update(meta_updates)
    _dump_json(man, Path(directory) / MANIFEST)


def read_array(directory, name: str, manifest: dict | None = None, verify: bool = True):
    man = manifest or read_manifest(directory)
    try:
        entry = man["arrays"][name]
    except KeyError:
        raise ManifestError(f"{directory} has no array {name!r}") from None
    path = Path(directory) / entry["file"]
    if verify and sha256_file(path) != entry["sha256"]:
        raise ManifestError(f"hash mismatch for {path}")
    data = np.fromfile(path, dtype=entry["dtype"])
    return data.reshape(entry["shape"])


def read_bundle(directory, kind: str | None = None, verify: bool = True):
    man = read_manifest(directory)
    if kind is not None and man.get("kind") != kind:
        raise ManifestError(f"{directory} holds a {man.get('kind')!r}, expected {kind!r}")
    arrays = {name: read_array(directory, name, man, verify) for name in man["arrays"]}
    return arrays, man


def bundle_is_valid(directory, meta_match: dict | None = None) -> bool:
    """True when the manifest exists, every hash matches and ``meta`` agrees."""
    try:
        man = read_manifest(directory)
        for entry in man["arrays"].values():
            if sha256_file(Path(directory) / entry["file"]) != entry["sha256"]:
                return False
    except (ManifestError, OSError, KeyError, json.JSONDecodeError):
        return False
    return all(man["meta"].get(k) == v for k, v in (meta_match or {}).items())


def save_dataset(directory, dataset, meta: dict | None = None) -> Path:
    m = dict(dataset.meta)
    m.update(meta or {})
    return write_bundle(directory, dataset.arrays(), m, "dataset")


def load_dataset(directory, verify: bool = True):
    from .synthesis import Dataset, TimeGrid

    arrays, man = read_bundle(directory, "dataset", verify)
    tg = TimeGrid(**man["meta"]["time_grid"])
    return Dataset(time_grid=tg, passive_x=arrays.get("passive_x"),
                   passive_y=arrays.get("passive_y"), active=arrays.get("active"),
                   incident=arrays.get("incident"), meta=man["meta"])
