"""
concurrex - Bipartite entanglement measures on truncated Hilbert spaces

Concurrence, tangle and the PHC measure for pure and mixed states,
convex-roof estimation, truncation-convergence scans and LOCC
monotonicity audits, with a command-line front end.

Version: 0.3.0
"""

__version__ = "0.3.0"
__author__ = "concurrex contributors"
__description__ = "Concurrence, tangle and PHC entanglement measures for bipartite states"
__url__ = "https://github.com/concurrex/concurrex"
__license__ = "MIT"

# Public API
__all__ = [
    "__version__",
    "__author__",
    "__description__",
    "__url__",
    "__license__",
]
