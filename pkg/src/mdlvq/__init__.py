"""Two-description lattice vector quantizers built from pairs of similar sublattices."""

from .errors import (
    ConstructionError,
    CorruptionError,
    InputError,
    MDLVQError,
    NotCleanError,
    ResourceError,
    UnsupportedError,
    VerificationError,
)
from .lattice import Lattice, Similarity, make_lattice, quantize
from .rings import EisensteinInt, GaussianInt, Quaternion
from .sublattice import Sublattice, SublatticeSystem, build_system, is_clean, similar_sublattice
from .labeling import Labeling, lcm_reduce, solve_labeling
from .quantizer import Quantizer, QuantizerConfig, measure

__version__ = "0.1.0"
