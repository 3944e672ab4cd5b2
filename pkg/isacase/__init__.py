from isacase.commrate import avg_comm_rate, comm_ase
from isacase.config import RunConfig, load_config
from isacase.mathkern import QuadratureSpec
from isacase.netmodel import FormulaVariant, NetworkParams, PerfPoint, ResourceAllocation, validate
from isacase.senserate import avg_radar_rate, sense_ase

__all__ = [
    "FormulaVariant",
    "NetworkParams",
    "PerfPoint",
    "QuadratureSpec",
    "ResourceAllocation",
    "RunConfig",
    "avg_comm_rate",
    "avg_radar_rate",
    "comm_ase",
    "load_config",
    "sense_ase",
    "validate",
]
