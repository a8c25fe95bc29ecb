"""Multi-ring data center networks with greedy coordinate routing.

Switches live on L virtual rings (one coordinate in [0,1) per ring), are
wired to their ring neighbors plus random free-port pairings, and forward
packets by minimizing circular distance across spaces.
"""

__version__ = "0.1.0"

from .geometry import circular_distance, mcd, d_mcd, control_area_size
from .topology import (
    Topology,
    ConfigurationError,
    TopologyFormatError,
    balanced_coordinate,
    build_deploy_as_whole,
    connect_free_ports,
    add_switch_incremental,
    generate_random_regular,
    random_regular_network,
    load_topology,
    save_topology,
)
from .routing import (
    RoutingTable,
    DestinationAddress,
    FlowTuple,
    PathRecord,
    build_routing_table,
    greediest_next_hop,
    route,
    multipath_candidates,
    multipath_route,
    key_hash,
    home_switches,
    key_route,
)

__all__ = [
    "circular_distance", "mcd", "d_mcd", "control_area_size",
    "Topology", "ConfigurationError", "TopologyFormatError",
    "balanced_coordinate", "build_deploy_as_whole", "connect_free_ports",
    "add_switch_incremental", "generate_random_regular",
    "random_regular_network", "load_topology", "save_topology",
    "RoutingTable", "DestinationAddress", "FlowTuple", "PathRecord",
    "build_routing_table", "greediest_next_hop", "route",
    "multipath_candidates", "multipath_route",
    "key_hash", "home_switches", "key_route",
]
