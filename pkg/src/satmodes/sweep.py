"""Sweep driver: build both channels once, scan sorter crosstalk and dimension.

Produces two flat tables.  The detection table scores every point by the
computational-basis error probability; the key-rate table scores by secret
bits per photon.  Subspaces are re-optimized at every point for the active
objective, so a detection row and a key-rate row at the same (d, eta1) may
legitimately quote different mode subsets.

Spatial-mode rows do not involve the pulsed sorter, so they are constant in
eta1; they are still replicated across the grid to keep the tables
rectangular for plotting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .config import RunConfig
from .detection import error_probability, optimize_subspace, total_probabilities
from .dispersion import crosstalk_matrix, tmm_coefficient
from .errors import CacheMismatchError, UnsupportedDimensionError
from .qkd import (QkdOutcome, build_mubs, evaluate_oam_qkd, evaluate_tm_detection,
                  evaluate_tm_qkd)
from .sorter import SorterModel
from .turbulence import TurbulenceEnsemble, run_ensemble, smm_coefficient

__all__ = ["SCHEMA_VERSION", "ResultRow", "run_sweep", "write_csv", "write_json",
           "read_json", "write_plot_data", "result_schema"]

SCHEMA_VERSION = 1

_COLUMNS = ("table", "encoding", "d", "eta1", "compensated", "subspace",
            "p_e", "q_error", "k1", "t_avg", "c_mismatch", "key", "status",
            "seed", "n_realizations", "h0", "aperture_radius")


@dataclass(frozen=True)
class ResultRow:
    """One sweep point.  None marks a column that does not apply to the row."""

    table: str                      # "detection" | "qkd"
    encoding: str                   # "tm" | "oam"
    d: int
    eta1: float
    compensated: bool | None        # None: no dispersion dependence in this row
    subspace: tuple[int, ...]
    p_e: float | None
    q_error: float | None
    k1: float | None
    t_avg: float | None
    c_mismatch: float | None
    key: float | None
    status: str                     # ok | clamped | saturated | unsupported-dimension
    seed: int | None
    n_realizations: int | None
    h0: float
    aperture_radius: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["subspace"] = list(self.subspace)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRow":
        data = dict(data)
        data["subspace"] = tuple(data["subspace"])
        return cls(**data)


def _status_of(outcome: QkdOutcome) -> str:
    if outcome.saturated:
        return "saturated"
    if outcome.clamped:
        return "clamped"
    return "ok"


def _ensure_ensemble(config: RunConfig,
                     ensemble: TurbulenceEnsemble | None) -> TurbulenceEnsemble:
    if ensemble is None:
        if config.seed is None:
            raise ValueError("config.seed is required to draw a turbulence ensemble; "
                             "set it or pass a precomputed ensemble")
        return run_ensemble(config.turbulence_params(), config.n_realizations,
                            config.seed)
    if ensemble.params != config.turbulence_params():
        raise CacheMismatchError("supplied ensemble was drawn with different "
                                 "channel parameters than the config requests")
    return ensemble


def _supported(d: int) -> bool:
    try:
        build_mubs(d)
    except UnsupportedDimensionError:
        return False
    return True


def run_sweep(config: RunConfig, ensemble: TurbulenceEnsemble | None = None,
              progress=None) -> list[ResultRow]:
    """Full scan over (table, encoding, compensation, d, eta1).

    The turbulence ensemble is drawn once (or taken from the caller) and
    shared by every row: spatial rows consume its crosstalk blocks, pulsed
    rows consume its fundamental-mode survival as the mismatch factor.
    """
    say = progress or (lambda _msg: None)
    say("building spectral grid and layered dispersion channel")
    grid = config.spectral_grid()
    stack = config.layer_stack()
    amp = {c: crosstalk_matrix(config.tm_orders, grid, stack, compensated=c)
           for c in (False, True)}
    c_tmm = {c: tmm_coefficient(grid, stack, compensated=c) for c in (False, True)}
    say("drawing turbulence ensemble")
    ensemble = _ensure_ensemble(config, ensemble)
    c_smm = smm_coefficient(ensemble)
    mean_oam = ensemble.mean_probabilities()
    shared = dict(seed=ensemble.seed, h0=config.h0,
                  aperture_radius=config.aperture_radius)
    n_real = ensemble.n_realizations
    rows: list[ResultRow] = []

    say("detection table, pulsed encoding")
    for comp in (False, True):
        for d in config.d_values:
            for eta1 in config.detection_grid:
                if eta1 > config.eta0:
                    continue   # sorter model requires crosstalk <= efficiency
                model = SorterModel(d, config.eta0, eta1)
                subset, p_e = optimize_subspace(
                    config.tm_orders, d,
                    lambda sub: evaluate_tm_detection(amp[comp].restrict(sub), model)[0])
                _, t_mean = evaluate_tm_detection(amp[comp].restrict(subset), model)
                rows.append(ResultRow(table="detection", encoding="tm", d=d,
                                      eta1=eta1, compensated=comp, subspace=subset,
                                      p_e=p_e, q_error=None, k1=None, t_avg=t_mean,
                                      c_mismatch=None, key=None, status="ok",
                                      n_realizations=None, **shared))

    say("detection table, spatial encoding")
    for d in config.d_values:
        def oam_pe(sub: tuple[int, ...]) -> float:
            p_tot, _ = total_probabilities(mean_oam.restrict(sub), np.eye(len(sub)))
            return error_probability(p_tot)

        subset, p_e = optimize_subspace(config.l_values, d, oam_pe)
        _, t_s = total_probabilities(mean_oam.restrict(subset), np.eye(d))
        t_mean = float(np.mean(t_s))
        for eta1 in config.detection_grid:
            rows.append(ResultRow(table="detection", encoding="oam", d=d,
                                  eta1=eta1, compensated=None, subspace=subset,
                                  p_e=p_e, q_error=None, k1=None, t_avg=t_mean,
                                  c_mismatch=None, key=None, status="ok",
                                  n_realizations=n_real, **shared))

    say("key-rate table, pulsed encoding")
    for comp in (False, True):
        for d in config.d_values:
            if not _supported(d):
                for eta1 in config.eta1_values:
                    rows.append(_unsupported("tm", d, eta1, comp, **shared))
                continue
            for eta1 in config.eta1_values:
                if eta1 > config.eta0:
                    continue
                model = SorterModel(d, config.eta0, eta1)
                subset, _ = optimize_subspace(
                    config.tm_orders, d,
                    lambda sub: evaluate_tm_qkd(amp[comp].restrict(sub), sub,
                                                model, c_smm).key,
                    maximize=True)
                out = evaluate_tm_qkd(amp[comp].restrict(subset), subset, model, c_smm)
                rows.append(_qkd_row(out, eta1, comp, n_real, **shared))

    say("key-rate table, spatial encoding")
    for d in config.d_values:
        if not _supported(d):
            for comp in (False, True):
                for eta1 in config.eta1_values:
                    rows.append(_unsupported("oam", d, eta1, comp, **shared))
            continue
        # the mismatch factor scales the key linearly, so the best subset is
        # independent of compensation: optimize once with unit mismatch
        subset, _ = optimize_subspace(
            config.l_values, d,
            lambda sub: evaluate_oam_qkd(ensemble.subspace_blocks(sub), sub, 1.0).key,
            maximize=True)
        for comp in (False, True):
            out = evaluate_oam_qkd(ensemble.subspace_blocks(subset), subset, c_tmm[comp])
            for eta1 in config.eta1_values:
                rows.append(_qkd_row(out, eta1, comp, n_real, **shared))
    say(f"sweep finished: {len(rows)} rows")
    return rows


def _qkd_row(out: QkdOutcome, eta1: float, compensated: bool, n_real: int,
             **shared) -> ResultRow:
    return ResultRow(table="qkd", encoding=out.encoding, d=out.d, eta1=eta1,
                     compensated=compensated, subspace=out.subspace, p_e=None,
                     q_error=out.q_error, k1=out.k1, t_avg=out.t_avg,
                     c_mismatch=out.c_mismatch, key=out.key,
                     status=_status_of(out), n_realizations=n_real, **shared)


def _unsupported(encoding: str, d: int, eta1: float, compensated: bool,
                 **shared) -> ResultRow:
    return ResultRow(table="qkd", encoding=encoding, d=d, eta1=eta1,
                     compensated=compensated, subspace=(), p_e=None, q_error=None,
                     k1=None, t_avg=None, c_mismatch=None, key=None,
                     status="unsupported-dimension", n_realizations=None, **shared)


# ---------------------------------------------------------------------------
# serialization

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ";".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)   # shortest round-trip form, byte-stable
    return str(value)


def write_csv(rows: list[ResultRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for row in rows:
            writer.writerow([_cell(getattr(row, name)) for name in _COLUMNS])


def write_json(rows: list[ResultRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, "rows": [r.to_dict() for r in rows]}
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_json(path: str | Path) -> list[ResultRow]:
    doc = json.loads(Path(path).read_text())
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"result schema version {version} not supported "
                         f"(expected {SCHEMA_VERSION})")
    return [ResultRow.from_dict(item) for item in doc["rows"]]


def result_schema() -> dict:
    """JSON schema for the result document written by write_json."""
    text = resources.files("satmodes").joinpath("data/result_schema.json").read_text()
    return json.loads(text)


def write_plot_data(rows: list[ResultRow], out_dir: str | Path) -> tuple[Path, Path]:
    """Two plot-ready CSVs: error probability and secret key rate vs eta1.

    Each output row carries the panel coordinates (ground altitude, aperture
    radius) so data from several sweep runs can be concatenated into one
    multi-panel figure source.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pe_path = out_dir / "plot_error_probability.csv"
    key_path = out_dir / "plot_key_rate.csv"
    header = ("h0", "aperture_radius", "encoding", "compensated", "d", "eta1", "value")
    with pe_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if row.table == "detection" and row.status == "ok":
                writer.writerow([_cell(v) for v in
                                 (row.h0, row.aperture_radius, row.encoding,
                                  row.compensated, row.d, row.eta1, row.p_e)])
    with key_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if row.table == "qkd" and row.status != "unsupported-dimension":
                writer.writerow([_cell(v) for v in
                                 (row.h0, row.aperture_radius, row.encoding,
                                  row.compensated, row.d, row.eta1, row.key)])
    return pe_path, key_path
