"""Size guards for the exponential searches.

Every exhaustive routine in this package takes a guard as a keyword
argument defaulting to one of the values below.  Exceeding a guard raises
:class:`CapExceeded`, which is a *refusal* (the tool gave up), never a
refutation (the tool proved absence).  The distinction matters: callers
must be able to trust that a reported refutation came from an exhausted
search.
"""

STRONG_CONNECTIVITY_VERTEX_CAP = 12
PARTITION_VERTEX_CAP = 12
CIRCULAR_FLOW_EDGE_CAP = 20
SOLVE_BASE_VERTICES = 6
SOLVE_SEARCH_CAP = 10**8


class CapExceeded(RuntimeError):
    """A size guard prevented a verdict; the question remains open."""
