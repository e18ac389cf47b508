"""One-level density toolkit for two families of elliptic-curve
L-functions: exact family averages and their closed forms, Hecke traces by
independent oracles, truncated Euler products for the arithmetic factors,
density predictions with lower-order terms, and desk-scale zero statistics.
"""

__version__ = "0.1.0"

from . import arith, averages, cli, density, hecke, lfunc, ratios, special  # noqa: F401
