"""Linkability of anonymous-cryptocurrency schemes under a three-layer adversary model."""
from .ledger import World, WorldConfig, new_world
from .privacy_core import (AnonymitySet, LinkageDistribution, compose_linkage, is_unlinkable,
                           transpose_linkage)
from .schemes import SCHEME_NAMES, get_scheme_class

__all__ = [
    "AnonymitySet", "LinkageDistribution", "compose_linkage", "is_unlinkable", "transpose_linkage",
    "World", "WorldConfig", "new_world", "SCHEME_NAMES", "get_scheme_class",
]
