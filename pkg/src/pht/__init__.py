"""Pairwise Hotelling tests for high-dimensional mean vectors."""

from .baselines import (BaselineOutcome, calibrate, dht_statistic, dht_statistic_two,
                        uht_statistic, uht_statistic_two)
from .core import Cov2, PairSummaries, invert_cov2, kendall_tau_matrix, leave2out_cov2, leave2out_mean
from .datagen import (PARETO_C0_SQ, CovModel, MeanSpec, build_sigma, correlation_matrix,
                      generate_pair, generate_two_sample, sample_double_pareto)
from .errors import (ConfigError, DataValidationError, DegenerateVarianceError,
                     InsufficientSampleError, InternalConsistencyError, PhtError,
                     SingularBlockError)
from .harness import SimConfig, SimReport, run_false_true_positive, run_power, run_size
from .one_sample import (power_one, statistic_t1, statistic_w1, test_one_sample,
                         trace_hat_one)
from .outcome import TestOutcome
from .screening import ProjectorBlocks, ScreeningSets, projector_quadratic, screen, screen_two_sample
from .tau_select import TauSelectConfig, select_tau0, snr_hat_one, snr_hat_two
from .two_sample import (phi_factor, power_two, statistic_t2, statistic_w2,
                         test_two_sample, trace_hat_two)

__version__ = "0.1.0"

__all__ = [
    "BaselineOutcome", "calibrate", "dht_statistic", "dht_statistic_two",
    "uht_statistic", "uht_statistic_two",
    "Cov2", "PairSummaries", "invert_cov2", "kendall_tau_matrix",
    "leave2out_cov2", "leave2out_mean",
    "CovModel", "MeanSpec", "build_sigma", "generate_pair", "generate_two_sample",
    "PARETO_C0_SQ",
    "correlation_matrix",
    "sample_double_pareto",
    "ConfigError", "DataValidationError", "DegenerateVarianceError",
    "InsufficientSampleError", "InternalConsistencyError", "PhtError",
    "SingularBlockError",
    "SimConfig", "SimReport", "run_false_true_positive", "run_power", "run_size",
    "power_one", "statistic_t1", "statistic_w1", "test_one_sample", "trace_hat_one",
    "TestOutcome",
    "ProjectorBlocks", "ScreeningSets", "projector_quadratic", "screen",
    "screen_two_sample",
    "TauSelectConfig", "select_tau0", "snr_hat_one", "snr_hat_two",
    "phi_factor", "power_two", "statistic_t2", "statistic_w2", "test_two_sample",
    "trace_hat_two",
]
