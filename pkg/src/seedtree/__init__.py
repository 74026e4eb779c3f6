"""Self-adjusting capacity-c trees with hash-addressed items and local routing."""

__version__ = "0.1.0"

from .addressing import AddressBook, hash_bit, path_node, route_child  # noqa: E402
from .tree import AccessRecord, CorruptedStateError, SeedTree, init, state_digest  # noqa: E402

__all__ = [
    "AccessRecord",
    "AddressBook",
    "CorruptedStateError",
    "SeedTree",
    "hash_bit",
    "init",
    "path_node",
    "route_child",
    "state_digest",
]
