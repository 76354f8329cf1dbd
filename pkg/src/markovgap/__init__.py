"""Monte Carlo and exact tools for tripartite entanglement of random states.

Modules
-------
qstate    states, seeds, partial traces
measures  entropies, negativity, reflected entropy, Markov gap
analytic  closed-form phase-diagram predictions and the MP law
zoo       GHZ/W/triangle/SOTS and stabilizer model states
epopt     entanglement of purification optimiser
stab      stabilizer tableaux
ensemble  sweeps and experiments; ``output``/``config``/``cli`` drive them
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ConfigError,
    ConsistencyError,
    ConstructionError,
    DomainError,
    MarkovGapError,
    NumericError,
)
from .qstate import DensityMatrix, PureState, SeedTree, Tripartition  # noqa: E402

__all__ = [
    "__version__", "CapacityError", "ConfigError", "ConsistencyError", "ConstructionError",
    "DomainError", "MarkovGapError", "NumericError", "DensityMatrix", "PureState", "SeedTree",
    "Tripartition",
]
