from .copra import CopraConfig, CopraResult, copra
from .louvain import LouvainConfig, LouvainResult, Network, local_moves, louvain
from .modularity import modularity, q_gain_percent
from .partition import (CoverPartition, Partition, align_partition, read_cover,
                        read_partition, write_cover, write_partition)

__all__ = [
    "CopraConfig", "CopraResult", "copra",
    "LouvainConfig", "LouvainResult", "Network", "local_moves", "louvain",
    "modularity", "q_gain_percent",
    "CoverPartition", "Partition", "align_partition", "read_cover",
    "read_partition", "write_cover", "write_partition",
]
