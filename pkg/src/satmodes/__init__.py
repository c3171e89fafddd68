"""satmodes: mode-encoded single-photon downlinks through a layered atmosphere.

Two high-dimensional encodings of one photon, one atmosphere. Pulsed
(Hermite-Gauss spectral) modes ride through a dispersive layered air column
and are read out by an imperfect mode sorter; vortex (Laguerre-Gauss) modes
diffract through Monte-Carlo turbulence phase screens and are read out by an
ideal filter. Both feed the same detection statistics and secret-key-rate
machinery so the encodings can be compared point by point.
"""

from .atmosphere import (LayerStack, build_layers, dispersion_coefficients,
                         fried_parameter, hv_cn2, refractive_index)
from .cache import load_ensemble, save_ensemble
from .config import RunConfig, auto_extent, desk_scale_config, load_config, save_config
from .detection import error_probability, optimize_subspace, total_probabilities
from .dispersion import compensate_gdd, crosstalk_matrix, propagate, tmm_coefficient
from .errors import (CacheChecksumError, CacheMismatchError, DegenerateChannelError,
                     EnsembleCacheError, GridExtentError, IncompatibleGridError,
                     TruncationError, UnsupportedDimensionError)
from .matrices import AmplitudeMatrix, conjugation_correct
from .qkd import (QkdOutcome, build_mubs, evaluate_oam_detection, evaluate_oam_qkd,
                  evaluate_tm_detection, evaluate_tm_qkd, key_rate_per_photon,
                  secret_key_rate)
from .sorter import SorterModel, separability, srt_matrix
from .sweep import ResultRow, read_json, run_sweep, write_csv, write_json, write_plot_data
from .temporal import SpectralGrid, build_grid, hg_amplitude, inner_product, pulse_sigma
from .turbulence import (TurbulenceEnsemble, TurbulenceParams, lg_mode, plan_screens,
                         run_ensemble, smm_coefficient)

__version__ = "0.1.0"
