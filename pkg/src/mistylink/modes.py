"""Modes of operation over any 64-bit block cipher: OFB and CBC.

OFB carries frame payloads (stream-like, no expansion, bit-local errors);
CBC exists for the authentication tag chain, for benchmarks, and as the
error-propagation contrast.  Frames themselves are never CBC-encrypted.
"""

from . import ciphers
from .errors import BlockAlignmentError

BLOCK = 8
ZERO_IV = bytes(BLOCK)


class BlockCipherHandle:
    """A cipher keyed once for repeated use by the mode layer.

    ``encrypt_block``/``decrypt_block`` are bound callables taking and
    returning 8-byte blocks; ``key_material_bytes`` is the prepared
    schedule's static footprint (used by the benchmark harness).
    """

    __slots__ = ("cipher", "profile", "encrypt_block", "decrypt_block", "key_material_bytes")

    def __init__(self, cipher: str, key: bytes, profile: str = "size"):
        enc, dec, material = ciphers.prepare(cipher, key, profile)
        self.cipher = cipher
        self.profile = profile
        self.encrypt_block = enc
        self.decrypt_block = dec
        self.key_material_bytes = material

    def __repr__(self) -> str:
        return f"BlockCipherHandle({self.cipher!r}, profile={self.profile!r})"


def _check_iv(iv: bytes) -> None:
    if len(iv) != BLOCK:
        raise ValueError(f"IV must be {BLOCK} bytes, got {len(iv)}")


def ofb_process(cipher: BlockCipherHandle, iv: bytes, data: bytes) -> bytes:
    """XOR data with the keystream E(iv), E(E(iv)), ...

    Output length equals input length; the final keystream block is
    truncated.  Applying the operation twice recovers the input, so the
    same call encrypts and decrypts.
    """
    _check_iv(iv)
    encrypt = cipher.encrypt_block
    out = bytearray()
    reg = bytes(iv)
    full = len(data) - len(data) % BLOCK
    for off in range(0, full, BLOCK):
        reg = encrypt(reg)
        out += (int.from_bytes(data[off:off + BLOCK], "big")
                ^ int.from_bytes(reg, "big")).to_bytes(BLOCK, "big")
    if full != len(data):
        reg = encrypt(reg)
        out += bytes(c ^ r for c, r in zip(data[full:], reg))
    return bytes(out)


def _check_aligned(data: bytes) -> None:
    if not data or len(data) % BLOCK:
        raise BlockAlignmentError(
            f"CBC input must be a nonzero multiple of {BLOCK} bytes, got {len(data)}"
        )


def cbc_encrypt(cipher: BlockCipherHandle, iv: bytes, plaintext: bytes) -> bytes:
    """Standard CBC: each block XORed with the previous ciphertext block
    (the IV for the first) before encryption.  Callers pad first."""
    _check_iv(iv)
    _check_aligned(plaintext)
    encrypt = cipher.encrypt_block
    out = bytearray()
    chain = bytes(iv)
    for off in range(0, len(plaintext), BLOCK):
        block = (int.from_bytes(plaintext[off:off + BLOCK], "big")
                 ^ int.from_bytes(chain, "big")).to_bytes(BLOCK, "big")
        chain = encrypt(block)
        out += chain
    return bytes(out)


def cbc_decrypt(cipher: BlockCipherHandle, iv: bytes, ciphertext: bytes) -> bytes:
    _check_iv(iv)
    _check_aligned(ciphertext)
    decrypt = cipher.decrypt_block
    out = bytearray()
    chain = bytes(iv)
    for off in range(0, len(ciphertext), BLOCK):
        block = ciphertext[off:off + BLOCK]
        out += (int.from_bytes(decrypt(block), "big")
                ^ int.from_bytes(chain, "big")).to_bytes(BLOCK, "big")
        chain = block
    return bytes(out)


def pad_iso(data: bytes) -> bytes:
    """Append 0x80 then zero bytes up to the next block boundary.

    Always adds at least one byte, so the padding is unambiguous and
    ``unpad_iso`` inverts it exactly.
    """
    out = bytearray(data)
    out.append(0x80)
    out += bytes(-len(out) % BLOCK)
    return bytes(out)


def unpad_iso(data: bytes) -> bytes:
    i = len(data)
    while i > 0 and data[i - 1] == 0x00:
        i -= 1
    if i == 0 or data[i - 1] != 0x80:
        raise ValueError("invalid padding: no 0x80 marker")
    return data[:i - 1]
