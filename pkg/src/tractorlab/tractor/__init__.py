from .connection import (
    ConnectionMatrix, compatibility_tau, connection_matrix, curvature_blocks, tau_map, tractor_curvature,
)
from .splitting import (
    TractorVector, change_matrix, change_matrix_at, convert, tractor_metric, tractor_metric_matrix,
)
from .transport import (
    Arc, ConformalFamily, GreatCircles, Line, LoopPath, Poly, Segment, StepSizeError, TransportResult, holonomy,
    holonomy_metric_defect, parallel_transport, path_from_spec, segment, tractor_frame_change, transport_array,
)

__all__ = [
    "Arc", "ConformalFamily", "ConnectionMatrix", "GreatCircles", "Line", "LoopPath", "Poly", "Segment", "StepSizeError",
    "TractorVector", "TransportResult", "change_matrix", "change_matrix_at", "compatibility_tau",
    "connection_matrix", "convert", "curvature_blocks", "holonomy", "holonomy_metric_defect",
    "parallel_transport", "path_from_spec", "segment", "tau_map", "tractor_curvature",
    "tractor_frame_change", "tractor_metric", "tractor_metric_matrix", "transport_array",
]
