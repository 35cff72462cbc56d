"""Pydantic request/response models for the HTTP service.

Byte-valued fields travel as lowercase hex strings, mirroring the CLI.
"""

from typing import Literal

from pydantic import BaseModel, Field

Mode = Literal["ae", "auth"]


class KeygenRequest(BaseModel):
    seed: int | None = Field(default=None, description="deterministic generation seed")


class KeyPairResponse(BaseModel):
    enc_key: str
    mac_key: str


class SealRequest(BaseModel):
    enc_key: str
    mac_key: str
    mode: Mode = "ae"
    dst: int = Field(ge=0, le=0xFFFF)
    src: int = Field(ge=0, le=0xFFFF)
    ctr: int = Field(ge=1, le=0xFFFFFFFF, description="explicit frame counter")
    payload_hex: str = ""


class FrameResponse(BaseModel):
    frame_hex: str
    ctr: int


class OpenRequest(BaseModel):
    enc_key: str
    mac_key: str
    frame_hex: str


class OpenResponse(BaseModel):
    dst: int
    src: int
    mode: Mode
    ctr: int
    payload_hex: str


class MacRequest(BaseModel):
    mac_key: str
    message_hex: str = ""


class MacResponse(BaseModel):
    tag_hex: str


class LinkCreateRequest(BaseModel):
    enc_key: str
    mac_key: str


class LinkCreateResponse(BaseModel):
    link_id: str


class LinkSealRequest(BaseModel):
    mode: Mode = "ae"
    dst: int = Field(ge=0, le=0xFFFF)
    src: int = Field(ge=0, le=0xFFFF)
    payload_hex: str = ""


class LinkOpenRequest(BaseModel):
    frame_hex: str


class VectorResult(BaseModel):
    name: str
    ok: bool


class VectorsResponse(BaseModel):
    results: list[VectorResult]
    all_ok: bool


class SimulateRequest(BaseModel):
    scenario: str = Field(description="scenario file content, not a path")


class MetricsResponse(BaseModel):
    sent: int
    delivered: int
    dropped: int
    accepted: int
    rejected_bad_mac: int
    rejected_replay: int
    rejected_malformed: int
    goodput_bytes: int
    overhead_bytes: int
    frames_with_flips: int
    flipped_ciphertext_bits: int
    corrupted_plaintext_bits: int
    report: str


class PropagationRequest(BaseModel):
    message_len: int = Field(ge=1, le=4096)
    seed: int = 0
    enc_key: str | None = None


class PropagationStatsModel(BaseModel):
    mode: str
    message_len: int
    ciphertext_len: int
    flip_positions: int
    min_corrupted: int
    mean_corrupted: float
    max_corrupted: int


class PropagationResponse(BaseModel):
    ofb: PropagationStatsModel
    cbc: PropagationStatsModel


class BenchRequest(BaseModel):
    cipher: Literal["misty1", "skipjack", "rc5-32"] = "misty1"
    mode: Literal["ofb", "cbc"] = "ofb"
    profile: Literal["size", "speed"] = "size"
    payload_size: int = Field(default=1024, ge=1, le=1 << 20)
    iterations: int = Field(default=8, ge=1, le=10_000)


class BenchRecordModel(BaseModel):
    cipher: str
    mode: str
    profile: str
    source: str
    code_memory: int | None
    data_memory: int | None
    keysetup_ns: float | None
    enc_cost: float | None
    dec_cost: float | None


class RankCheckResponse(BaseModel):
    matches_published: bool
    report: str
