"""Digital twin of a seated echocardiography posture bench."""

from .config import BenchConfig, load_bench_config
from .errors import (
    BenchError,
    CommandRejected,
    ConfigurationError,
    InputError,
    PlanningError,
    RangeError,
)
from .kinematics import (
    JointState,
    MechanismConfig,
    StepCommand,
    base_sync,
    default_mechanism_config,
    fk_base,
    fk_lateral,
    fk_pitch,
    fk_thoracic,
    ik,
    inverse_axis,
    joint_state,
    pendulum_pose,
    roll_total,
    steps_to_travel,
    travel_to_steps,
)
from .load_model import (
    LoadParams,
    PredictedLoad,
    SplitResult,
    SplitWeights,
    predict_load,
    split_optimize,
)
from .planner import (
    PlanResult,
    ViewCatalog,
    ViewRegion,
    feasible_region,
    plan_per_view,
    plan_posture,
)
from .posture import (
    ChestPlane,
    GravityAngles,
    PostureAngles,
    ProbeTrack,
    body_axes,
    compose_normal,
    fit_plane,
    gravity_preimage,
    load_track,
    plane_to_posture,
    posture_to_gravity,
)
from .emg import (
    CONDITIONS,
    Condition,
    EmgRecord,
    LoadEstimate,
    bandpass,
    channel_load,
    condition_ratios,
    estimate_load,
    load_recording,
    median_ratios,
    rms_envelope,
)
from .session import EStop, Release, Session, SetSubject, SetTarget, SetWeights, replay
from .trajectory import Trajectory, make_trajectory

__version__ = "0.1.0"
