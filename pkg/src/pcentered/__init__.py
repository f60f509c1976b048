"""p-centered colorings of K_t-minor-free graphs from layered decompositions."""

from .centered import chi_p_exact, tw_backend, verify_p_centered, verify_p_centered_ordered
from .decomposition import TreeDecomposition, helly_hitting_or_packing, make_natural
from .good_coloring import check_goodness_witness, good_witness, phi_from_lrs
from .graph import Graph, grid_graph
from .layered import LayeredRSDecomposition, Layering, grid_instance, validate_lrs
from .partition import MinorCertificate, build_partition, theorem1_coloring

__version__ = "0.1.0"
