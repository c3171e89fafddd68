"""On-disk ensemble cache: roundtrip, checksum, mismatch detection."""

import dataclasses
import json

import numpy as np
import pytest

from satmodes.cache import FORMAT_VERSION, cache_key, load_ensemble, save_ensemble
from satmodes.errors import (CacheChecksumError, CacheMismatchError,
                             EnsembleCacheError)
from satmodes.turbulence import TurbulenceEnsemble


def test_roundtrip_preserves_everything(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    loaded = load_ensemble(path)
    assert loaded.params == tiny_ensemble.params
    assert loaded.seed == tiny_ensemble.seed
    assert np.array_equal(loaded.matrices, tiny_ensemble.matrices)
    assert np.array_equal(loaded.smm_samples, tiny_ensemble.smm_samples)


def test_expected_params_accepts_match(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    loaded = load_ensemble(path, expected_params=tiny_ensemble.params,
                           expected_seed=tiny_ensemble.seed)
    assert loaded.n_realizations == tiny_ensemble.n_realizations


def test_params_mismatch_rejected(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    other = dataclasses.replace(tiny_ensemble.params, aperture_radius=3.0)
    with pytest.raises(CacheMismatchError, match="aperture_radius"):
        load_ensemble(path, expected_params=other)


def test_seed_mismatch_rejected(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    with pytest.raises(CacheMismatchError, match="seed"):
        load_ensemble(path, expected_seed=tiny_ensemble.seed + 1)


def test_tampered_payload_detected(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    with np.load(path) as archive:
        header, smm = archive["header"], archive["smm_samples"]
        doctored = archive["matrices"].copy()
    doctored[0, 0, 0] += 1e-3
    np.savez(path, matrices=doctored, smm_samples=smm, header=header)
    with pytest.raises(CacheChecksumError):
        load_ensemble(path)


def test_unsupported_format_version(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    with np.load(path) as archive:
        header = json.loads(bytes(archive["header"]).decode())
        matrices, smm = archive["matrices"], archive["smm_samples"]
    header["format_version"] = FORMAT_VERSION + 1
    np.savez(path, matrices=matrices, smm_samples=smm,
             header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8))
    with pytest.raises(EnsembleCacheError, match="version"):
        load_ensemble(path)


def test_garbage_file_rejected(tmp_path):
    path = tmp_path / "junk.npz"
    path.write_bytes(b"not an archive at all")
    with pytest.raises(EnsembleCacheError):
        load_ensemble(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(EnsembleCacheError):
        load_ensemble(tmp_path / "absent.npz")


def test_missing_array_rejected(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    with np.load(path) as archive:
        header = archive["header"]
        matrices = archive["matrices"]
    np.savez(path, matrices=matrices, header=header)
    with pytest.raises(EnsembleCacheError):
        load_ensemble(path)


def test_checksum_and_mismatch_errors_are_cache_errors():
    assert issubclass(CacheChecksumError, EnsembleCacheError)
    assert issubclass(CacheMismatchError, EnsembleCacheError)


def test_cache_key_tracks_inputs(tiny_params):
    base = cache_key(tiny_params, seed=11, n_realizations=3)
    assert len(base) == 16 and int(base, 16) >= 0
    assert cache_key(tiny_params, seed=11, n_realizations=3) == base
    assert cache_key(tiny_params, seed=12, n_realizations=3) != base
    assert cache_key(tiny_params, seed=11, n_realizations=4) != base
    bumped = dataclasses.replace(tiny_params, n_screens=tiny_params.n_screens + 1)
    assert cache_key(bumped, seed=11, n_realizations=3) != base


def test_save_creates_parent_directories(tmp_path, tiny_ensemble):
    path = tmp_path / "nested" / "dir" / "ensemble.npz"
    save_ensemble(path, tiny_ensemble)
    assert isinstance(load_ensemble(path), TurbulenceEnsemble)
