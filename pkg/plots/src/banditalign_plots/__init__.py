"""Chart rendering for banditalign experiment outputs."""

from .charts import (
    AGGREGATE_COLUMNS,
    AgentCurve,
    ReferenceCurve,
    SchemaError,
    parse_reference,
    plot_regret,
    read_aggregate,
)

__version__ = "0.1.0"
