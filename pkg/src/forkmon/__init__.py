"""Impact detection, classification and localization for forklift
accelerometer logs, plus the power model and synthetic validation suite.
"""

from .calibration import (
    CalibrationParams,
    calibrate_trace,
    compensate_gravity,
    estimate_tilt,
    estimate_yaw_moving,
    euler_321,
    find_moving_window,
    find_static_window,
    level_trace,
)
from .classify import (
    BrakingOutcome,
    LongClass,
    Route,
    SegmentFeatures,
    ShortClass,
    categorize,
    classify_long,
    classify_segment,
    classify_short,
    compute_features,
    confirm_braking,
    label_vibration,
    localize,
)
from .config import AnalysisConfig, BrakingAxis, load_config
from .errors import (
    CalibrationError,
    DutyOverflow,
    EmptySegment,
    ForkmonError,
    FrameMismatch,
    InputError,
    InsufficientMotion,
    InvalidValue,
    MalformedHeader,
    NoOverlap,
    NonMonotoneTimestamps,
    NotStationary,
    OverlappingSpecs,
    TiltOutOfRange,
    Unachievable,
    UnknownParameter,
    UnknownUnit,
)
from .logio import LogRecord, emit_report, parse_log, write_log
from .model import (
    FSR,
    GRAVITY,
    EventKind,
    EventReport,
    Frame,
    FusedTrace,
    ImuSample,
    MountPosition,
    Segment,
    SensorTrace,
    SeverityLabel,
    Zone,
    a_total,
    resample_align,
)
from .pipeline import AnalysisResult, analyze_log, analyze_traces
from .power import (
    PowerProfile,
    autonomy_years,
    daily_energy,
    missed_peak_fraction,
    solve_active_time,
)
from .segmentation import extract_segments
from .suite import (
    ConfusionReport,
    build_scenarios,
    run_scenario_suite,
    sensitivity_sweep,
)
from .synth import (
    BrakingIntensity,
    BumpSpeed,
    GroundTruth,
    ScenarioKind,
    ScenarioSpec,
    Severity,
    TruthEntry,
    generate,
)

__version__ = "0.1.0"
