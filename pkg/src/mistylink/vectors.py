"""Load and run the shipped test vectors: cipher blocks and golden frames.

Cipher lines: ``<cipher> <hex key> <hex plaintext> <hex ciphertext>``.
Frame lines: ``<hex enc_key> <hex mac_key> <mode> <dst> <src> <ctr>
<hex payload> <hex wire_frame>`` with ``-`` for an empty payload.
Hex is case-insensitive on input and lowercase on output.
"""

from dataclasses import dataclass
from importlib import resources

from . import ciphers
from .errors import ParseError
from .linklayer import LinkKey, LinkTxState, ReplayState, open_frame, seal

_ONE_SHOT = {
    "misty1": lambda key, block, direction: (
        ciphers.misty1_encrypt_block(ciphers.misty1_expand_key(key), block)
        if direction == "encrypt"
        else ciphers.misty1_decrypt_block(ciphers.misty1_expand_key(key), block)
    ),
    "skipjack": ciphers.skipjack_block,
    "rc5-32": ciphers.rc5_block,
}


@dataclass(frozen=True)
class CipherVector:
    cipher: str
    key: bytes
    plaintext: bytes
    ciphertext: bytes
    line: int

    @property
    def name(self) -> str:
        return f"{self.cipher} vector (line {self.line})"


@dataclass(frozen=True)
class FrameVector:
    enc_key: bytes
    mac_key: bytes
    mode: str
    dst: int
    src: int
    ctr: int
    payload: bytes
    wire: bytes
    line: int

    @property
    def name(self) -> str:
        return f"frame vector {self.mode} (line {self.line})"


def _hex(token: str, line_no: int, what: str) -> bytes:
    try:
        return bytes.fromhex(token)
    except ValueError:
        raise ParseError(f"bad hex in {what}: {token!r}", line_no) from None


def _data_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line.split()


def parse_cipher_vectors(text: str) -> list[CipherVector]:
    out = []
    for line_no, parts in _data_lines(text):
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields, got {len(parts)}", line_no)
        cipher = parts[0]
        if cipher not in _ONE_SHOT:
            raise ParseError(f"unknown cipher {cipher!r}", line_no)
        key = _hex(parts[1], line_no, "key")
        if len(key) != ciphers.KEY_LENGTHS[cipher]:
            raise ParseError(
                f"{cipher} key must be {ciphers.KEY_LENGTHS[cipher]} bytes", line_no
            )
        pt = _hex(parts[2], line_no, "plaintext")
        ct = _hex(parts[3], line_no, "ciphertext")
        if len(pt) != 8 or len(ct) != 8:
            raise ParseError("plaintext and ciphertext must be 8 bytes", line_no)
        out.append(CipherVector(cipher, key, pt, ct, line_no))
    return out


def parse_frame_vectors(text: str) -> list[FrameVector]:
    out = []
    for line_no, parts in _data_lines(text):
        if len(parts) != 8:
            raise ParseError(f"expected 8 fields, got {len(parts)}", line_no)
        if parts[2] not in ("ae", "auth"):
            raise ParseError(f"mode must be 'ae' or 'auth', got {parts[2]!r}", line_no)
        try:
            dst, src, ctr = int(parts[3]), int(parts[4]), int(parts[5])
        except ValueError:
            raise ParseError("dst, src, and ctr must be integers", line_no) from None
        payload = b"" if parts[6] == "-" else _hex(parts[6], line_no, "payload")
        out.append(FrameVector(
            enc_key=_hex(parts[0], line_no, "enc key"),
            mac_key=_hex(parts[1], line_no, "mac key"),
            mode=parts[2],
            dst=dst, src=src, ctr=ctr,
            payload=payload,
            wire=_hex(parts[7], line_no, "wire frame"),
            line=line_no,
        ))
    return out


def check_cipher_vector(vec: CipherVector) -> bool:
    op = _ONE_SHOT[vec.cipher]
    return (op(vec.key, vec.plaintext, "encrypt") == vec.ciphertext
            and op(vec.key, vec.ciphertext, "decrypt") == vec.plaintext)


def check_frame_vector(vec: FrameVector) -> bool:
    key = LinkKey(vec.enc_key, vec.mac_key)
    sealed = seal(key, vec.mode, vec.dst, vec.src, vec.payload, LinkTxState(next_ctr=vec.ctr))
    if sealed != vec.wire:
        return False
    header, payload = open_frame(key, vec.wire, ReplayState())
    return payload == vec.payload and header.ctr == vec.ctr


def default_paths() -> tuple[str, str]:
    data = resources.files("mistylink").joinpath("data")
    return (str(data / "cipher_vectors.txt"), str(data / "frame_vectors.txt"))


def run_vector_files(cipher_path=None, frame_path=None) -> list[tuple[str, bool]]:
    """Run every vector; returns (name, passed) pairs in file order."""
    default_cipher, default_frame = default_paths()
    results = []
    with open(cipher_path or default_cipher, "r", encoding="utf-8") as fh:
        for vec in parse_cipher_vectors(fh.read()):
            results.append((vec.name, check_cipher_vector(vec)))
    with open(frame_path or default_frame, "r", encoding="utf-8") as fh:
        for vec in parse_frame_vectors(fh.read()):
            results.append((vec.name, check_frame_vector(vec)))
    return results
