from .generator import PRESETS, GeneratorSpec, generate_instance
from .io import export_report, ingest_vectors, load_report_json, write_vectors
from .sweep import CellSummary, SweepReport, SweepSpec, run_sweep

__all__ = [
    "PRESETS",
    "GeneratorSpec",
    "generate_instance",
    "export_report",
    "ingest_vectors",
    "load_report_json",
    "write_vectors",
    "CellSummary",
    "SweepReport",
    "SweepSpec",
    "run_sweep",
]
