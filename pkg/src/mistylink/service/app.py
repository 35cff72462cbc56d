"""FastAPI service wrapping the library for long-running, multi-client use.

Stateless endpoints mirror the CLI (seal with an explicit counter, open
without replay history, MAC, vectors, simulation, benchmarks).  Link
sessions add the stateful part a gateway needs: the server holds each
link's transmit counter and per-source replay floor, serialized by a
per-link lock, so concurrent clients can never reuse an IV or replay a
frame through the same session.

Library errors map to structured JSON bodies ``{"error": kind,
"message": text}``: malformed_frame and bad_mac are 400, replay_rejected
and counter_exhausted are 409, configuration and key errors are 422.
"""

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import bench as bench_mod
from .. import simnet, vectors
from ..errors import (
    BadMac,
    ConfigError,
    CounterWrapError,
    KeyLengthError,
    MalformedFrame,
    MistyLinkError,
    ParseError,
    PayloadLengthError,
    ReplayRejected,
)
from ..linklayer import (
    LinkKey,
    LinkTxState,
    ReplayState,
    generate_link_key,
    open_frame,
    seal,
)
from ..mac import cbc_mac
from ..modes import BlockCipherHandle
from . import schemas

_ERROR_MAP = (
    (MalformedFrame, 400, "malformed_frame"),
    (BadMac, 400, "bad_mac"),
    (ReplayRejected, 409, "replay_rejected"),
    (CounterWrapError, 409, "counter_exhausted"),
    (ParseError, 422, "parse_error"),
    (KeyLengthError, 422, "key_length"),
    (PayloadLengthError, 422, "payload_length"),
    (ConfigError, 422, "config_error"),
)


def _status_and_kind(exc: Exception) -> tuple[int, str]:
    for exc_type, status, kind in _ERROR_MAP:
        if isinstance(exc, exc_type):
            return status, kind
    return 400 if isinstance(exc, MistyLinkError) else 422, "invalid_value"


def _hex_bytes(value: str, name: str, length: int | None = None) -> bytes:
    try:
        data = bytes.fromhex(value)
    except ValueError:
        raise ConfigError(f"{name} must be an even-length hex string") from None
    if length is not None and len(data) != length:
        raise ConfigError(f"{name} must be {length} bytes ({2 * length} hex digits)")
    return data


def _link_key(enc_hex: str, mac_hex: str) -> LinkKey:
    return LinkKey(_hex_bytes(enc_hex, "enc_key", 16), _hex_bytes(mac_hex, "mac_key", 16))


@dataclass
class _LinkSession:
    key: LinkKey
    tx: LinkTxState = field(default_factory=LinkTxState)
    replay: ReplayState = field(default_factory=ReplayState)
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app() -> FastAPI:
    app = FastAPI(
        title="mistylink",
        description="Link-layer frame protection, simulation, and benchmarks over HTTP.",
        version="0.1.0",
    )
    links: dict[str, _LinkSession] = {}

    @app.exception_handler(MistyLinkError)
    async def _mistylink_error(_, exc: MistyLinkError):
        status, kind = _status_and_kind(exc)
        return JSONResponse(status_code=status,
                            content={"error": kind, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(_, exc: ValueError):
        return JSONResponse(status_code=422,
                            content={"error": "invalid_value", "message": str(exc)})

    def _session(link_id: str) -> _LinkSession:
        session = links.get(link_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail={"error": "unknown_link", "message": link_id})
        return session

    def _open_response(header, payload: bytes) -> schemas.OpenResponse:
        return schemas.OpenResponse(dst=header.dst, src=header.src, mode=header.mode,
                                    ctr=header.ctr, payload_hex=payload.hex())

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/keygen", response_model=schemas.KeyPairResponse)
    def keygen(req: schemas.KeygenRequest):
        key = generate_link_key(req.seed)
        return schemas.KeyPairResponse(enc_key=key.enc_key.hex(), mac_key=key.mac_key.hex())

    @app.post("/seal", response_model=schemas.FrameResponse)
    def seal_frame(req: schemas.SealRequest):
        key = _link_key(req.enc_key, req.mac_key)
        payload = _hex_bytes(req.payload_hex, "payload_hex")
        wire = seal(key, req.mode, req.dst, req.src, payload, LinkTxState(next_ctr=req.ctr))
        return schemas.FrameResponse(frame_hex=wire.hex(), ctr=req.ctr)

    @app.post("/open", response_model=schemas.OpenResponse)
    def open_received(req: schemas.OpenRequest):
        # Stateless verification: no replay history is kept here; use a
        # link session when replay protection across calls matters.
        key = _link_key(req.enc_key, req.mac_key)
        wire = _hex_bytes(req.frame_hex, "frame_hex")
        header, payload = open_frame(key, wire, ReplayState())
        return _open_response(header, payload)

    @app.post("/mac", response_model=schemas.MacResponse)
    def mac_message(req: schemas.MacRequest):
        handle = BlockCipherHandle("misty1", _hex_bytes(req.mac_key, "mac_key", 16))
        tag = cbc_mac(handle, _hex_bytes(req.message_hex, "message_hex"))
        return schemas.MacResponse(tag_hex=tag.hex())

    @app.post("/links", response_model=schemas.LinkCreateResponse, status_code=201)
    def create_link(req: schemas.LinkCreateRequest):
        link_id = uuid.uuid4().hex[:12]
        links[link_id] = _LinkSession(key=_link_key(req.enc_key, req.mac_key))
        return schemas.LinkCreateResponse(link_id=link_id)

    @app.delete("/links/{link_id}", status_code=204)
    def delete_link(link_id: str):
        _session(link_id)
        del links[link_id]

    @app.post("/links/{link_id}/seal", response_model=schemas.FrameResponse)
    def link_seal(link_id: str, req: schemas.LinkSealRequest):
        session = _session(link_id)
        payload = _hex_bytes(req.payload_hex, "payload_hex")
        with session.lock:
            ctr = session.tx.next_ctr
            wire = seal(session.key, req.mode, req.dst, req.src, payload, session.tx)
        return schemas.FrameResponse(frame_hex=wire.hex(), ctr=ctr)

    @app.post("/links/{link_id}/open", response_model=schemas.OpenResponse)
    def link_open(link_id: str, req: schemas.LinkOpenRequest):
        session = _session(link_id)
        wire = _hex_bytes(req.frame_hex, "frame_hex")
        with session.lock:
            header, payload = open_frame(session.key, wire, session.replay)
        return _open_response(header, payload)

    @app.get("/vectors", response_model=schemas.VectorsResponse)
    def run_vectors():
        results = vectors.run_vector_files()
        return schemas.VectorsResponse(
            results=[schemas.VectorResult(name=name, ok=ok) for name, ok in results],
            all_ok=all(ok for _, ok in results),
        )

    @app.post("/simulate", response_model=schemas.MetricsResponse)
    def simulate(req: schemas.SimulateRequest):
        config = simnet.parse_scenario(req.scenario)
        metrics = simnet.run_scenario(config)
        return schemas.MetricsResponse(
            sent=metrics.sent,
            delivered=metrics.delivered,
            dropped=metrics.dropped,
            accepted=metrics.accepted,
            rejected_bad_mac=metrics.rejected_bad_mac,
            rejected_replay=metrics.rejected_replay,
            rejected_malformed=metrics.rejected_malformed,
            goodput_bytes=metrics.goodput_bytes,
            overhead_bytes=metrics.overhead_bytes,
            frames_with_flips=metrics.frames_with_flips,
            flipped_ciphertext_bits=metrics.flipped_ciphertext_bits,
            corrupted_plaintext_bits=metrics.corrupted_plaintext_bits,
            report=simnet.render_metrics(metrics),
        )

    @app.post("/simulate/propagation", response_model=schemas.PropagationResponse)
    def propagation(req: schemas.PropagationRequest):
        key = _hex_bytes(req.enc_key, "enc_key", 16) if req.enc_key else None
        report = simnet.error_propagation_report(req.message_len, enc_key=key, seed=req.seed)

        def stats(s: simnet.PropagationStats) -> schemas.PropagationStatsModel:
            return schemas.PropagationStatsModel(
                mode=s.mode, message_len=s.message_len, ciphertext_len=s.ciphertext_len,
                flip_positions=s.flip_positions, min_corrupted=s.min_corrupted,
                mean_corrupted=s.mean_corrupted, max_corrupted=s.max_corrupted,
            )

        return schemas.PropagationResponse(ofb=stats(report.ofb), cbc=stats(report.cbc))

    @app.post("/bench", response_model=schemas.BenchRecordModel)
    def bench(req: schemas.BenchRequest):
        record = bench_mod.bench_cipher_mode(req.cipher, req.mode, req.payload_size,
                                             req.iterations, req.profile)
        return schemas.BenchRecordModel(**{
            name: getattr(record, name) for name in schemas.BenchRecordModel.model_fields
        })

    @app.get("/bench/paper-tables", response_model=schemas.RankCheckResponse)
    def paper_tables():
        report, match = bench_mod.published_ranking_check()
        return schemas.RankCheckResponse(
            matches_published=match,
            report=bench_mod.render_rank_report(report),
        )

    return app


app = create_app()
