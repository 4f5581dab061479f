"""circflow: exact combinatorics of modulo orientations on multigraphs.

The package certifies boundary achievability and strong group
connectivity, minimises the spanning-tree-packing partition weights,
applies lifting and contraction reductions with replayable traces, and
runs exact-rational face-charge redistribution on plane embeddings.
"""

__version__ = "0.1.0"

from .guards import CapExceeded  # noqa: F401
