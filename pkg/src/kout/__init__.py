"""Random k-out subgraphs of arbitrary host graphs.

Each vertex picks ``k`` random neighbors in a host graph; the union of the
picks is ``G_k``.  The package samples ``G_k``, certifies its connectivity,
searches it for Hamilton cycles, long paths and long cycles, and runs seeded
Monte Carlo experiments over all of that.
"""

from .dfs import DfsRun, dfs_long_path, run_dfs, long_path_trial
from .epochs import CycleResult, Epoch, ExplorationTree, classify, epoch_color, long_cycle
from .errors import KoutError
from .graph import Graph, read_edge_list, write_edge_list
from .posa import (
    PathState,
    brute_force_longest_path,
    extend_or_rotate_search,
    hamiltonicity_search,
    posa_bound_check,
    rotate,
    rotation_closure,
)
from .sampler import ChoiceOracle, ColorSpec, KOutSample, Mode, sample, sample_colored, underlying_graph
from .structure import connected_components, is_k_connected, vertex_connectivity

__version__ = "0.1.0"
