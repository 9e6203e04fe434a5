from .charts import BOUNDARY_MARGIN, ChartTransition, DomainError, MetricChart, conformal_rescale, transition_pushforward
from .config import chart_from_config, load_chart
from .curvature import CurvaturePack, bianchi_defect, curvature_pack, weyl_trace_defect
from .densities import WeightedScalar
from .library import REGISTERED_CHARTS, deck_transition, get_chart, get_transition, registered_transitions

__all__ = [
    "BOUNDARY_MARGIN", "REGISTERED_CHARTS", "ChartTransition", "CurvaturePack", "DomainError", "MetricChart", "WeightedScalar",
    "bianchi_defect", "chart_from_config", "conformal_rescale", "curvature_pack", "deck_transition",
    "get_chart", "get_transition", "load_chart", "registered_transitions", "transition_pushforward",
    "weyl_trace_defect",
]
