"""Shared protocol vocabulary: which protocol, which party, which purpose."""

from __future__ import annotations

from enum import Enum

ALICE = "alice"
BOB = "bob"


class ProtocolKind(str, Enum):
    """SQTP: standard two-bit teleportation. KAK: chained-XOR one-bit variant."""

    SQTP = "sqtp"
    KAK = "kak"


class Purpose(str, Enum):
    """Why a classical message was sent."""

    TELEPORT = "teleport"
    LOCC = "locc"
