"""CBC-MAC producing the 4-byte frame tag.

The message is padded with the 0x80 scheme, chained through the cipher
from a zero IV, and the tag is the first four bytes of the final block.
Plain CBC-MAC is only sound for fixed-length messages; the link layer
restores that regime by authenticating its length byte inside the first
MAC block, so every length class is a fixed-length message.
"""

from .modes import BLOCK, BlockCipherHandle, pad_iso

TAG_LEN = 4


def cbc_mac(cipher: BlockCipherHandle, message: bytes) -> bytes:
    """Tag32 over the message under the (separate) MAC key."""
    padded = pad_iso(message)
    encrypt = cipher.encrypt_block
    chain = 0
    for off in range(0, len(padded), BLOCK):
        block = int.from_bytes(padded[off:off + BLOCK], "big") ^ chain
        chain = int.from_bytes(encrypt(block.to_bytes(BLOCK, "big")), "big")
    return chain.to_bytes(BLOCK, "big")[:TAG_LEN]
