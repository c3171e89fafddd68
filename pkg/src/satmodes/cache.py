"""Versioned on-disk cache for turbulence ensembles.

A cache file is a numpy .npz archive holding the realization matrices, the
fundamental-mode overlap samples, and a JSON header with the format version,
master seed, parameter snapshot and a SHA-256 checksum of the payload bytes.
Loads verify the checksum and, when requested parameters are supplied, that
the snapshot matches them exactly.
"""

from __future__ import annotations

import hashlib
import json
import zipfile
from pathlib import Path

import numpy as np

from .errors import CacheChecksumError, CacheMismatchError, EnsembleCacheError
from .turbulence import TurbulenceEnsemble, TurbulenceParams

__all__ = ["FORMAT_VERSION", "save_ensemble", "load_ensemble", "cache_key"]

FORMAT_VERSION = 1


def _payload_checksum(matrices: np.ndarray, smm: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(matrices).tobytes())
    digest.update(np.ascontiguousarray(smm).tobytes())
    return digest.hexdigest()


def cache_key(params: TurbulenceParams, seed: int, n_realizations: int) -> str:
    """Short content address for a parameter set; names default cache files."""
    blob = json.dumps({"params": params.to_dict(), "seed": seed,
                       "n_realizations": n_realizations}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def save_ensemble(path: str | Path, ensemble: TurbulenceEnsemble) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format_version": FORMAT_VERSION,
        "seed": ensemble.seed,
        "n_realizations": ensemble.n_realizations,
        "params": ensemble.params.to_dict(),
        "checksum": _payload_checksum(ensemble.matrices, ensemble.smm_samples),
    }
    np.savez(path, matrices=ensemble.matrices, smm_samples=ensemble.smm_samples,
             header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8))


def load_ensemble(path: str | Path,
                  expected_params: TurbulenceParams | None = None,
                  expected_seed: int | None = None) -> TurbulenceEnsemble:
    """Read a cache file back; verify version, checksum and optional parameter match."""
    path = Path(path)
    try:
        with np.load(path) as archive:
            header = json.loads(bytes(archive["header"]).decode())
            matrices = archive["matrices"]
            smm = archive["smm_samples"]
    except (OSError, zipfile.BadZipFile, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise EnsembleCacheError(f"cannot read ensemble cache {path}: {exc}") from exc
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise EnsembleCacheError(f"cache format version {version} not supported "
                                 f"(expected {FORMAT_VERSION})")
    if _payload_checksum(matrices, smm) != header.get("checksum"):
        raise CacheChecksumError(f"ensemble cache {path} is corrupted (checksum mismatch)")
    params = TurbulenceParams.from_dict(header["params"])
    if expected_params is not None and params != expected_params:
        diff = [k for k in params.to_dict()
                if params.to_dict()[k] != expected_params.to_dict()[k]]
        raise CacheMismatchError(f"cached ensemble differs in {diff}")
    if expected_seed is not None and header["seed"] != expected_seed:
        raise CacheMismatchError(f"cached seed {header['seed']} != requested {expected_seed}")
    return TurbulenceEnsemble(params=params, seed=int(header["seed"]),
                              matrices=matrices, smm_samples=smm)
