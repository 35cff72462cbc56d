"""64-bit block cipher cores behind one uniform interface.

Supported ciphers and their fixed key lengths:

=========  =========  ==================================
name       key bytes  notes
=========  =========  ==================================
misty1     16         scheme cipher, explicit schedule
skipjack   10         baseline, one-shot interface
rc5-32     16         baseline (RC5-32/12/16), one-shot
=========  =========  ==================================

All cores are pure functions of their arguments; prepared key material
may be shared freely across callers.
"""

from functools import partial
from typing import Callable

from ..errors import KeyLengthError
from . import misty1, rc5, skipjack
from .misty1 import Misty1Schedule

BLOCK_LEN = 8

KEY_LENGTHS = {"misty1": 16, "skipjack": 10, "rc5-32": 16}
CIPHER_NAMES = tuple(KEY_LENGTHS)
PROFILES = ("size", "speed")

# --- spec'd one-shot operations -------------------------------------------

misty1_expand_key = misty1.expand_key
misty1_fi = misty1.fi
misty1_encrypt_block = misty1.encrypt_block
misty1_decrypt_block = misty1.decrypt_block


def _check_direction(direction: str) -> None:
    if direction not in ("encrypt", "decrypt"):
        raise ValueError(f"direction must be 'encrypt' or 'decrypt', got {direction!r}")


def skipjack_block(key: bytes, block: bytes, direction: str = "encrypt") -> bytes:
    _check_direction(direction)
    if direction == "encrypt":
        return skipjack.encrypt(key, block)
    return skipjack.decrypt(key, block)


def rc5_block(key: bytes, block: bytes, direction: str = "encrypt") -> bytes:
    _check_direction(direction)
    s = rc5.expand_key(key)
    if direction == "encrypt":
        return rc5.encrypt(s, block)
    return rc5.decrypt(s, block)


# --- prepared cores for the mode layer ------------------------------------

BlockFn = Callable[[bytes], bytes]


def check_key(cipher: str, key: bytes) -> None:
    try:
        expected = KEY_LENGTHS[cipher]
    except KeyError:
        raise ValueError(f"unknown cipher {cipher!r}") from None
    if len(key) != expected:
        raise KeyLengthError(f"{cipher} key must be {expected} bytes, got {len(key)}")


def prepare(cipher: str, key: bytes, profile: str = "size") -> tuple[BlockFn, BlockFn, int]:
    """Key a cipher once for repeated block operations.

    Returns (encrypt_block, decrypt_block, key_material_bytes).  The
    "size" profile keeps the minimal schedule and selects subkeys per
    call; "speed" flattens the per-round key material up front.
    """
    check_key(cipher, key)
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    if cipher == "misty1":
        schedule = misty1.expand_key(key)
        if profile == "speed":
            enc, dec = misty1.table_driven_core(schedule)
        else:
            enc = partial(misty1.encrypt_block, schedule)
            dec = partial(misty1.decrypt_block, schedule)
        return enc, dec, misty1.MATERIAL_BYTES[profile]
    if cipher == "skipjack":
        if profile == "speed":
            cvs = skipjack.round_schedule(key)
            return (partial(skipjack.encrypt_scheduled, cvs),
                    partial(skipjack.decrypt_scheduled, cvs),
                    skipjack.MATERIAL_BYTES[profile])
        return (partial(skipjack.encrypt, key),
                partial(skipjack.decrypt, key),
                skipjack.MATERIAL_BYTES[profile])
    s = rc5.expand_key(key)
    return partial(rc5.encrypt, s), partial(rc5.decrypt, s), rc5.MATERIAL_BYTES[profile]
