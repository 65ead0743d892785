"""Logistic-map dynamics of firm variables: bifurcations, Lyapunov exponents,
cycle and risk forcing, and eight-channel firm stability."""

from firmdyn.bifurcation import (
    BifurcationDiagram,
    PeriodVerdict,
    SweepConfig,
    detect_crises,
    detect_period,
    estimate_accumulation,
    find_doubling_points,
    sweep,
)
from firmdyn.dynamics import LogisticMap, Orbit, fixed_points, iterate, step
from firmdyn.forcing import (
    Calibration,
    CycleSpec,
    RiskProfile,
    drive,
    map_to_lambda,
    superpose,
    total_risk,
)
from firmdyn.ingest import MetricSeries, load_series, normalize_to_calibration
from firmdyn.lyapunov import (
    LyapunovEstimate,
    classify,
    lyapunov_derivative,
    lyapunov_separation,
)
from firmdyn.stability import (
    THEORIES,
    FirmStabilityReport,
    TheoryChannel,
    channel_magnitude,
    evaluate_firm,
    pairwise_stable,
)

__version__ = "0.1.0"
