# install in development/editable mode
# pip install -e .
from .errors import MilnorCyclesError
from .scalars import FieldCtx, LocalScalar, TruncSeries, truncate
from .witt import WittVector, witt_add, witt_factor, witt_star, ghost, vanishing_level
from .talgebra import Extension, TriangularSystem, triangularize, base_change_point
from .cycles import TriangularCycle, CycleSum, check_admissible, normalize_system
from .witness import make_witness, boundary, verify
from .kgroups import MilnorSymbol, SymbolSum, graph, norm, reduce_to_graphs
