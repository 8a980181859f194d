"""Learn contact-rich insertion skills from teleoperated demonstrations and
reproduce them autonomously in a planar compliant simulator."""

__version__ = "0.1.0"

from .dmp import DmpConfig, DmpModel, OrientationDmp, fit_dmp, phase, rollout_dmp
from .executor import (AdmittanceConfig, EpisodeResult, ExecutionLimits,
                       SkillModel, admittance_step, execute, plan)
from .insertion_sim import (EvalReport, InitialCondition, PlanarPlugSim,
                            SceneConfig, canonical_conditions, evaluate,
                            scripted_demonstrate)
from .recording import (RawStream, Recording, Stream, read_archive,
                        synchronize, validate, write_archive)
from .wrench_gmm import (GmmConfig, GmmModel, WrenchReference, build_dataset,
                         fit_gmm, gmr, log_likelihood, select_k_bic)

__all__ = [
    "__version__",
    "AdmittanceConfig", "DmpConfig", "DmpModel", "EpisodeResult", "EvalReport",
    "ExecutionLimits", "GmmConfig", "GmmModel", "InitialCondition",
    "OrientationDmp", "PlanarPlugSim", "RawStream", "Recording", "SceneConfig",
    "SkillModel", "Stream", "WrenchReference", "admittance_step",
    "build_dataset", "canonical_conditions", "evaluate", "execute", "fit_dmp",
    "fit_gmm", "gmr", "log_likelihood", "phase", "plan", "read_archive",
    "rollout_dmp", "scripted_demonstrate", "select_k_bic", "synchronize",
    "validate", "write_archive",
]
