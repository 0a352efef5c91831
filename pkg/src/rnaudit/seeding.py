"""Deterministic per-walk seed derivation.

Every simulated walk gets its own RNG stream derived from the master seed
plus the walk's coordinates (start id, policy index, member index, ...).
The derivation is a keyed hash, so results are reproducible bit-for-bit
and independent of the order or parallelism in which walks execute.
"""

import hashlib
import struct

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *parts: int | str) -> int:
    """Hash (master, *parts) into a 64-bit seed for one walk."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", master & _MASK64))
    for part in parts:
        if isinstance(part, int):
            h.update(b"i")
            h.update(struct.pack("<q", part))
        else:
            h.update(b"s")
            h.update(part.encode("utf-8"))
            h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")
