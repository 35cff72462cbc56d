"""Link-layer frame protection: authenticated encryption or authentication
only, counter-derived IVs, and strict replay rejection.

Wire format, big-endian throughout::

    dst(2) | src(2) | flags(1) | len(1) | ctr(4) | body(len) | tag(4)

Flag bit 0 selects the mode (1 = authenticated encryption, 0 =
authentication only); bits 1-7 are reserved and must be zero.  The body is
the OFB ciphertext of the payload in AE mode and the payload verbatim in
auth-only mode, so the wire length is always 14 + payload length.

The 4-byte counter is transmitted in full: it feeds the per-frame IV
(dst | src | ctr), gives receivers stateless resynchronization after
loss, and drives replay rejection.  Under OFB, IV reuse leaks keystream,
so counters are never reused and exhaustion demands a rekey.

Receive order: the tag is verified first, then structural consistency,
then the replay counter, and only then is the body decrypted.  Forged or
replayed input therefore never mutates state, and the length-field check
applies only to frames that already carry a valid tag.
"""

import hmac
import secrets
import struct
from dataclasses import dataclass
from functools import cached_property

from .rng import SplitMix64

from .errors import (
    BadMac,
    CounterWrapError,
    KeyLengthError,
    MalformedFrame,
    PayloadLengthError,
    ReplayRejected,
)
from .mac import TAG_LEN, cbc_mac
from .modes import BlockCipherHandle, ofb_process

HEADER_LEN = 10
FRAME_OVERHEAD = HEADER_LEN + TAG_LEN
MAX_PAYLOAD = 255
MAX_COUNTER = 0xFFFFFFFF

MODE_AE = "ae"
MODE_AUTH = "auth"

_FLAG_AE = 0x01
_RESERVED_FLAGS = 0xFE
_HEADER_FMT = ">HHBBI"


@dataclass(frozen=True)
class LinkKey:
    """Separate 16-byte MISTY1 keys for encryption and authentication."""

    enc_key: bytes
    mac_key: bytes

    def __post_init__(self):
        for name, key in (("enc_key", self.enc_key), ("mac_key", self.mac_key)):
            if len(key) != 16:
                raise KeyLengthError(f"{name} must be 16 bytes, got {len(key)}")
        if self.enc_key == self.mac_key:
            raise ValueError("encryption and MAC keys must differ")

    @cached_property
    def enc_handle(self) -> BlockCipherHandle:
        return BlockCipherHandle("misty1", self.enc_key)

    @cached_property
    def mac_handle(self) -> BlockCipherHandle:
        return BlockCipherHandle("misty1", self.mac_key)


@dataclass(frozen=True)
class FrameHeader:
    dst: int
    src: int
    flags: int
    length: int
    ctr: int

    @property
    def mode(self) -> str:
        return MODE_AE if self.flags & _FLAG_AE else MODE_AUTH

    def to_bytes(self) -> bytes:
        return struct.pack(_HEADER_FMT, self.dst, self.src, self.flags, self.length, self.ctr)

    @classmethod
    def parse(cls, raw: bytes) -> "FrameHeader":
        if len(raw) != HEADER_LEN:
            raise MalformedFrame(f"header must be {HEADER_LEN} bytes, got {len(raw)}")
        dst, src, flags, length, ctr = struct.unpack(_HEADER_FMT, raw)
        return cls(dst, src, flags, length, ctr)


@dataclass(frozen=True)
class SecuredFrame:
    """Parsed wire frame; the tag has not necessarily been verified."""

    header: FrameHeader
    body: bytes
    tag: bytes

    def to_wire(self) -> bytes:
        return self.header.to_bytes() + self.body + self.tag

    @classmethod
    def parse(cls, wire: bytes) -> "SecuredFrame":
        if len(wire) < FRAME_OVERHEAD:
            raise MalformedFrame(
                f"frame of {len(wire)} bytes is shorter than header plus tag"
            )
        header = FrameHeader.parse(wire[:HEADER_LEN])
        return cls(header, wire[HEADER_LEN:-TAG_LEN], wire[-TAG_LEN:])


@dataclass
class LinkTxState:
    """Transmit-side counter; strictly increasing, starts at 1, never reused."""

    next_ctr: int = 1


class ReplayState:
    """Highest accepted counter per source address.  An unseen source has
    an implicit maximum of 0, so counter 0 is never acceptable."""

    def __init__(self):
        self.highest: dict[int, int] = {}

    def check_update(self, src: int, ctr: int) -> bool:
        """Accept iff ctr exceeds the stored maximum; on accept, store it.

        Gaps are legal (lost frames); equality or regress is a replay.
        """
        if ctr <= self.highest.get(src, 0):
            return False
        self.highest[src] = ctr
        return True


def replay_check_update(replay: ReplayState, src: int, ctr: int) -> bool:
    return replay.check_update(src, ctr)


def generate_link_key(seed: int | None = None) -> LinkKey:
    """Fresh key pair: deterministic from a seed, system entropy without.

    The MAC half is redrawn on the (astronomically unlikely) collision
    with the encryption half, since LinkKey requires distinct keys.
    """
    if seed is not None:
        rng = SplitMix64(seed)
        draw = rng.next_bytes
    else:
        draw = secrets.token_bytes
    enc = draw(16)
    mac = draw(16)
    while mac == enc:
        mac = draw(16)
    return LinkKey(enc, mac)


def _check_address(name: str, value: int) -> None:
    if not 0 <= value <= 0xFFFF:
        raise ValueError(f"{name} must fit in 16 bits, got {value}")


def header_for(mode: str, dst: int, src: int, length: int, ctr: int) -> FrameHeader:
    if mode not in (MODE_AE, MODE_AUTH):
        raise ValueError(f"mode must be '{MODE_AE}' or '{MODE_AUTH}', got {mode!r}")
    _check_address("dst", dst)
    _check_address("src", src)
    return FrameHeader(dst, src, _FLAG_AE if mode == MODE_AE else 0, length, ctr)


def build_iv(header: FrameHeader) -> bytes:
    """Per-frame IV: dst | src | ctr, 8 bytes, injective over the triple."""
    return struct.pack(">HHI", header.dst, header.src, header.ctr)


def seal(key: LinkKey, mode: str, dst: int, src: int, payload: bytes,
         tx: LinkTxState) -> bytes:
    """Protect a payload, consuming one counter value from tx.

    Raises PayloadLengthError above 255 bytes and CounterWrapError once
    the counter space is exhausted (the caller must rekey; an IV is never
    reused under one key).
    """
    if len(payload) > MAX_PAYLOAD:
        raise PayloadLengthError(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    if tx.next_ctr < 1:
        raise ValueError("frame counters start at 1; 0 means 'never seen'")
    if tx.next_ctr > MAX_COUNTER:
        raise CounterWrapError("frame counter exhausted; rekey the link")
    header = header_for(mode, dst, src, len(payload), tx.next_ctr)
    tx.next_ctr += 1
    if mode == MODE_AE:
        body = ofb_process(key.enc_handle, build_iv(header), payload)
    else:
        body = bytes(payload)
    header_bytes = header.to_bytes()
    tag = cbc_mac(key.mac_handle, header_bytes + body)
    return header_bytes + body + tag


def verify_frame(key: LinkKey, wire: bytes) -> SecuredFrame:
    """Parse and authenticate a frame without touching replay state.

    Tag verification runs over the received header and body before the
    length field is trusted, so any single corrupted byte in a valid
    frame surfaces as BadMac rather than as a structural error.
    """
    frame = SecuredFrame.parse(wire)
    if frame.header.flags & _RESERVED_FLAGS:
        raise MalformedFrame(f"reserved flag bits set: {frame.header.flags:#04x}")
    expected = cbc_mac(key.mac_handle, wire[:HEADER_LEN] + frame.body)
    if not hmac.compare_digest(frame.tag, expected):
        raise BadMac("authentication tag mismatch")
    if frame.header.length != len(frame.body):
        raise MalformedFrame(
            f"length field {frame.header.length} disagrees with body of {len(frame.body)} bytes"
        )
    return frame


def open_frame(key: LinkKey, wire: bytes, replay: ReplayState) -> tuple[FrameHeader, bytes]:
    """Verify, replay-check, and recover the payload of a received frame.

    Raises MalformedFrame / BadMac / ReplayRejected; replay state advances
    only when the frame is accepted.
    """
    frame = verify_frame(key, wire)
    if not replay.check_update(frame.header.src, frame.header.ctr):
        raise ReplayRejected(
            f"counter {frame.header.ctr} not newer than last accepted from {frame.header.src}"
        )
    if frame.header.mode == MODE_AE:
        payload = ofb_process(key.enc_handle, build_iv(frame.header), frame.body)
    else:
        payload = frame.body
    return frame.header, payload
