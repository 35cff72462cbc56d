"""RC5-32/12/16: 32-bit words, 12 rounds, 16-byte key.

Rivest's parameterized Feistel-like cipher with data-dependent rotations.
Word I/O is little-endian as the algorithm prescribes.  One core serves
both benchmark profiles; there is no meaningful table-free variant.
"""

from ..errors import KeyLengthError

KEY_LEN = 16
BLOCK_LEN = 8
ROUNDS = 12

_T = 2 * (ROUNDS + 1)
_C = KEY_LEN // 4
_P32 = 0xB7E15163
_Q32 = 0x9E3779B9
_MASK = 0xFFFFFFFF


def _rotl(x: int, n: int) -> int:
    n &= 31
    return ((x << n) | (x >> (32 - n))) & _MASK


def _rotr(x: int, n: int) -> int:
    n &= 31
    return ((x >> n) | (x << (32 - n))) & _MASK


def expand_key(key: bytes) -> tuple[int, ...]:
    """Mix the key into the 26-word round subkey table."""
    if len(key) != KEY_LEN:
        raise KeyLengthError(f"rc5-32 key must be {KEY_LEN} bytes, got {len(key)}")
    l = [int.from_bytes(key[i:i + 4], "little") for i in range(0, KEY_LEN, 4)]
    s = [_P32]
    for _ in range(_T - 1):
        s.append((s[-1] + _Q32) & _MASK)
    a = b = i = j = 0
    for _ in range(3 * max(_T, _C)):
        a = s[i] = _rotl((s[i] + a + b) & _MASK, 3)
        b = l[j] = _rotl((l[j] + a + b) & _MASK, a + b)
        i = (i + 1) % _T
        j = (j + 1) % _C
    return tuple(s)


def encrypt(s, block: bytes) -> bytes:
    if len(block) != BLOCK_LEN:
        raise ValueError(f"block must be {BLOCK_LEN} bytes, got {len(block)}")
    a = (int.from_bytes(block[0:4], "little") + s[0]) & _MASK
    b = (int.from_bytes(block[4:8], "little") + s[1]) & _MASK
    for i in range(1, ROUNDS + 1):
        a = (_rotl(a ^ b, b) + s[2 * i]) & _MASK
        b = (_rotl(b ^ a, a) + s[2 * i + 1]) & _MASK
    return a.to_bytes(4, "little") + b.to_bytes(4, "little")


def decrypt(s, block: bytes) -> bytes:
    if len(block) != BLOCK_LEN:
        raise ValueError(f"block must be {BLOCK_LEN} bytes, got {len(block)}")
    a = int.from_bytes(block[0:4], "little")
    b = int.from_bytes(block[4:8], "little")
    for i in range(ROUNDS, 0, -1):
        b = _rotr((b - s[2 * i + 1]) & _MASK, a) ^ a
        a = _rotr((a - s[2 * i]) & _MASK, b) ^ b
    return ((a - s[0]) & _MASK).to_bytes(4, "little") + ((b - s[1]) & _MASK).to_bytes(4, "little")


# Prepared-key footprint: the 26-word subkey table, either profile.
MATERIAL_BYTES = {"size": _T * 4, "speed": _T * 4}
