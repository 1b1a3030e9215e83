from ._core import (
    ConfigError,
    Environment,
    EpisodeFinishedError,
    Pose,
    SumTree,
    action_decode,
    convergence_check,
    double_dqn_target,
    dueling_combine,
    evaluate,
    normalize_angle,
    replay,
    step_kinematics,
    train,
    __version__,
)

__all__ = [
    "ConfigError",
    "Environment",
    "EpisodeFinishedError",
    "Pose",
    "SumTree",
    "action_decode",
    "convergence_check",
    "double_dqn_target",
    "dueling_combine",
    "evaluate",
    "normalize_angle",
    "replay",
    "step_kinematics",
    "train",
    "__version__",
]
