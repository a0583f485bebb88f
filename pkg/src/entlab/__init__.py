"""entlab: a numerical laboratory for multiparty state merging, decoupling
bounds, rate/cost regions, and assisted entanglement distillation."""

from . import assisted, decoupling, entropy, protocols, qcore, regions, typicality

__all__ = [
    "assisted",
    "decoupling",
    "entropy",
    "protocols",
    "qcore",
    "regions",
    "typicality",
]

__version__ = "0.1.0"
