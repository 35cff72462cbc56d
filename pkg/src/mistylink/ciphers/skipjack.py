"""Skipjack block cipher: 64-bit block, 80-bit key, 32 rounds.

Follows the declassified algorithm specification: four 16-bit words
stepped by Rule A / Rule B (8 rounds each, A-B-A-B), with the keyed
G permutation running a 4-step byte Feistel over the F table.

The compact functions derive the per-round key bytes by index arithmetic;
``round_schedule`` plus the ``*_scheduled`` variants precompute all
32 x 4 key bytes once for repeated use under one key.
"""

from ..errors import KeyLengthError

KEY_LEN = 10
BLOCK_LEN = 8
ROUNDS = 32

F = (
    0xa3, 0xd7, 0x09, 0x83, 0xf8, 0x48, 0xf6, 0xf4, 0xb3, 0x21, 0x15, 0x78, 0x99, 0xb1, 0xaf, 0xf9,
    0xe7, 0x2d, 0x4d, 0x8a, 0xce, 0x4c, 0xca, 0x2e, 0x52, 0x95, 0xd9, 0x1e, 0x4e, 0x38, 0x44, 0x28,
    0x0a, 0xdf, 0x02, 0xa0, 0x17, 0xf1, 0x60, 0x68, 0x12, 0xb7, 0x7a, 0xc3, 0xe9, 0xfa, 0x3d, 0x53,
    0x96, 0x84, 0x6b, 0xba, 0xf2, 0x63, 0x9a, 0x19, 0x7c, 0xae, 0xe5, 0xf5, 0xf7, 0x16, 0x6a, 0xa2,
    0x39, 0xb6, 0x7b, 0x0f, 0xc1, 0x93, 0x81, 0x1b, 0xee, 0xb4, 0x1a, 0xea, 0xd0, 0x91, 0x2f, 0xb8,
    0x55, 0xb9, 0xda, 0x85, 0x3f, 0x41, 0xbf, 0xe0, 0x5a, 0x58, 0x80, 0x5f, 0x66, 0x0b, 0xd8, 0x90,
    0x35, 0xd5, 0xc0, 0xa7, 0x33, 0x06, 0x65, 0x69, 0x45, 0x00, 0x94, 0x56, 0x6d, 0x98, 0x9b, 0x76,
    0x97, 0xfc, 0xb2, 0xc2, 0xb0, 0xfe, 0xdb, 0x20, 0xe1, 0xeb, 0xd6, 0xe4, 0xdd, 0x47, 0x4a, 0x1d,
    0x42, 0xed, 0x9e, 0x6e, 0x49, 0x3c, 0xcd, 0x43, 0x27, 0xd2, 0x07, 0xd4, 0xde, 0xc7, 0x67, 0x18,
    0x89, 0xcb, 0x30, 0x1f, 0x8d, 0xc6, 0x8f, 0xaa, 0xc8, 0x74, 0xdc, 0xc9, 0x5d, 0x5c, 0x31, 0xa4,
    0x70, 0x88, 0x61, 0x2c, 0x9f, 0x0d, 0x2b, 0x87, 0x50, 0x82, 0x54, 0x64, 0x26, 0x7d, 0x03, 0x40,
    0x34, 0x4b, 0x1c, 0x73, 0xd1, 0xc4, 0xfd, 0x3b, 0xcc, 0xfb, 0x7f, 0xab, 0xe6, 0x3e, 0x5b, 0xa5,
    0xad, 0x04, 0x23, 0x9c, 0x14, 0x51, 0x22, 0xf0, 0x29, 0x79, 0x71, 0x7e, 0xff, 0x8c, 0x0e, 0xe2,
    0x0c, 0xef, 0xbc, 0x72, 0x75, 0x6f, 0x37, 0xa1, 0xec, 0xd3, 0x8e, 0x62, 0x8b, 0x86, 0x10, 0xe8,
    0x08, 0x77, 0x11, 0xbe, 0x92, 0x4f, 0x24, 0xc5, 0x32, 0x36, 0x9d, 0xcf, 0xf3, 0xa6, 0xbb, 0xac,
    0x5e, 0x6c, 0xa9, 0x13, 0x57, 0x25, 0xb5, 0xe3, 0xbd, 0xa8, 0x3a, 0x01, 0x05, 0x59, 0x2a, 0x46,
)


def check_key(key: bytes) -> None:
    if len(key) != KEY_LEN:
        raise KeyLengthError(f"skipjack key must be {KEY_LEN} bytes, got {len(key)}")


def round_schedule(key: bytes) -> tuple[tuple[int, int, int, int], ...]:
    """The four key bytes each of the 32 rounds feeds into G."""
    check_key(key)
    return tuple(
        tuple(key[(4 * k + i) % KEY_LEN] for i in range(4)) for k in range(ROUNDS)
    )


def _g(cv: tuple[int, int, int, int], w: int) -> int:
    g1 = (w >> 8) & 0xFF
    g2 = w & 0xFF
    g3 = F[g2 ^ cv[0]] ^ g1
    g4 = F[g3 ^ cv[1]] ^ g2
    g5 = F[g4 ^ cv[2]] ^ g3
    g6 = F[g5 ^ cv[3]] ^ g4
    return (g5 << 8) | g6


def _g_inv(cv: tuple[int, int, int, int], w: int) -> int:
    g5 = (w >> 8) & 0xFF
    g6 = w & 0xFF
    g4 = F[g5 ^ cv[3]] ^ g6
    g3 = F[g4 ^ cv[2]] ^ g5
    g2 = F[g3 ^ cv[1]] ^ g4
    g1 = F[g2 ^ cv[0]] ^ g3
    return (g1 << 8) | g2


def _words(block: bytes) -> tuple[int, int, int, int]:
    if len(block) != BLOCK_LEN:
        raise ValueError(f"block must be {BLOCK_LEN} bytes, got {len(block)}")
    return (
        int.from_bytes(block[0:2], "big"),
        int.from_bytes(block[2:4], "big"),
        int.from_bytes(block[4:6], "big"),
        int.from_bytes(block[6:8], "big"),
    )


def _pack(w1: int, w2: int, w3: int, w4: int) -> bytes:
    return b"".join(w.to_bytes(2, "big") for w in (w1, w2, w3, w4))


def encrypt_scheduled(cvs, block: bytes) -> bytes:
    w1, w2, w3, w4 = _words(block)
    k = 0
    for _ in range(2):
        for _ in range(8):  # Rule A
            gw = _g(cvs[k], w1)
            w1, w2, w3, w4 = gw ^ w4 ^ (k + 1), gw, w2, w3
            k += 1
        for _ in range(8):  # Rule B
            w1, w2, w3, w4 = w4, _g(cvs[k], w1), w1 ^ w2 ^ (k + 1), w3
            k += 1
    return _pack(w1, w2, w3, w4)


def decrypt_scheduled(cvs, block: bytes) -> bytes:
    w1, w2, w3, w4 = _words(block)
    k = ROUNDS - 1
    for _ in range(2):
        for _ in range(8):  # Rule B inverse
            g1 = _g_inv(cvs[k], w2)
            w1, w2, w3, w4 = g1, g1 ^ w3 ^ (k + 1), w4, w1
            k -= 1
        for _ in range(8):  # Rule A inverse
            w1, w2, w3, w4 = _g_inv(cvs[k], w2), w3, w4, w1 ^ w2 ^ (k + 1)
            k -= 1
    return _pack(w1, w2, w3, w4)


def encrypt(key: bytes, block: bytes) -> bytes:
    """Compact form: per-round key bytes picked out of the raw key."""
    check_key(key)
    w1, w2, w3, w4 = _words(block)
    for k in range(ROUNDS):
        cv = (key[(4 * k) % 10], key[(4 * k + 1) % 10],
              key[(4 * k + 2) % 10], key[(4 * k + 3) % 10])
        if (k // 8) % 2 == 0:  # Rule A
            gw = _g(cv, w1)
            w1, w2, w3, w4 = gw ^ w4 ^ (k + 1), gw, w2, w3
        else:  # Rule B
            w1, w2, w3, w4 = w4, _g(cv, w1), w1 ^ w2 ^ (k + 1), w3
    return _pack(w1, w2, w3, w4)


def decrypt(key: bytes, block: bytes) -> bytes:
    check_key(key)
    w1, w2, w3, w4 = _words(block)
    for k in range(ROUNDS - 1, -1, -1):
        cv = (key[(4 * k) % 10], key[(4 * k + 1) % 10],
              key[(4 * k + 2) % 10], key[(4 * k + 3) % 10])
        if (k // 8) % 2 == 0:  # Rule A inverse
            w1, w2, w3, w4 = _g_inv(cv, w2), w3, w4, w1 ^ w2 ^ (k + 1)
        else:  # Rule B inverse
            g1 = _g_inv(cv, w2)
            w1, w2, w3, w4 = g1, g1 ^ w3 ^ (k + 1), w4, w1
    return _pack(w1, w2, w3, w4)


# Prepared-key footprints: raw key only, or key plus the 32x4 round bytes.
MATERIAL_BYTES = {"size": KEY_LEN, "speed": KEY_LEN + ROUNDS * 4}
