"""cazackit: prime-length CAZAC sequences, Goldbach length extension,
correlation analysis, and delay/Doppler estimation experiments."""

__version__ = "0.1.0"

from .numtheory import GoldbachSplit, SplitPolicy, goldbach_even, goldbach_odd, is_prime, legendre
from .seqgen import ComplexSequence, SequenceSet, bjorck, circulant_set, cyclic_shift, root_set, zc
from .extend import (
    ExtensionPlan,
    default_bases,
    extend_even,
    extend_odd,
    extend_repetition,
    orthogonal_subset,
    repetition_set,
    select_columns,
)
from .corr import (
    AmbiguitySurface,
    CorrelationProfile,
    RmsCase,
    RmsPrediction,
    ambiguity,
    aperiodic_xcorr,
    inner_product,
    periodic_xcorr,
    predict_rms,
    time_domain,
)
from .sim import (
    CampaignPoint,
    CampaignResult,
    DetectionThreshold,
    SimScenario,
    TrialOutcome,
    calibrate_threshold,
    detect,
    measure_pfa,
    mitigate_coarse,
    mitigate_subset,
    run_campaign,
    synthesize_rx,
)

__all__ = [
    "GoldbachSplit", "SplitPolicy", "goldbach_even", "goldbach_odd", "is_prime", "legendre",
    "ComplexSequence", "SequenceSet", "bjorck", "circulant_set", "cyclic_shift", "root_set", "zc",
    "ExtensionPlan", "default_bases", "extend_even", "extend_odd", "extend_repetition",
    "orthogonal_subset", "repetition_set", "select_columns",
    "AmbiguitySurface", "CorrelationProfile", "RmsCase", "RmsPrediction",
    "ambiguity", "aperiodic_xcorr", "inner_product", "periodic_xcorr", "predict_rms", "time_domain",
    "CampaignPoint", "CampaignResult", "DetectionThreshold", "SimScenario", "TrialOutcome",
    "calibrate_threshold", "detect", "measure_pfa", "mitigate_coarse", "mitigate_subset",
    "run_campaign", "synthesize_rx",
    "__version__",
]
