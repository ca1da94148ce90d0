"""Version age of gossip on ring networks with jammed links."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    JammerPlacement,
    Line,
    Partition,
    Rates,
    Ring,
    Segment,
    SegmentKind,
    partition_from_placement,
    to_miniring_model,
)
from .analytic import (  # noqa: E402
    ContiguousSet,
    contiguous_set_age,
    line_ages,
    line_corner_age_closed_form,
    line_total_age,
    ring_node_age,
    ring_total_age,
    sandwich_check,
)
from .placement import (  # noqa: E402
    PlacementStrategy,
    place,
    ring_total_age_difference,
    split_total_age,
    system_age,
)
from .sim import SimConfig, SimResult, simulate  # noqa: E402
