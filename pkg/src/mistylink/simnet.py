"""Deterministic lossy-channel simulator for the secured link layer.

Frames flow seal -> transmit -> open in lock-step, one traffic flow at a
time, with every random draw taken from a seeded SplitMix64 tree:

    scenario seed -> per-flow stream -> per-frame stream

Each frame's stream supplies, in order, its payload bytes, the channel's
loss draw, the per-bit error draws (taken only when the bit error rate is
nonzero), and any adversary draws.  Identical configuration therefore
yields bit-identical metrics.

Two measurement regimes exist.  With MAC verification on, whole frames
cross the channel and the receiver's accept/reject counters tell the
end-to-end story.  With verification off, the channel corrupts only the
ciphertext body and the decrypted result is compared bit-for-bit against
the original plaintext, which isolates how each mode propagates errors
(OFB: one output bit per flipped bit; CBC: a garbled block plus one bit).
"""

from dataclasses import dataclass, field

from .errors import BadMac, ConfigError, CounterWrapError, MalformedFrame, ParseError, ReplayRejected
from .linklayer import (
    HEADER_LEN,
    MAX_COUNTER,
    MAX_PAYLOAD,
    MODE_AE,
    MODE_AUTH,
    FrameHeader,
    LinkKey,
    LinkTxState,
    ReplayState,
    build_iv,
    header_for,
    open_frame,
    seal,
    verify_frame,
)
from .mac import TAG_LEN, cbc_mac
from .modes import BlockCipherHandle, cbc_decrypt, cbc_encrypt, ofb_process, pad_iso, unpad_iso
from .rng import SplitMix64

ADVERSARIES = ("none", "replayer", "bit_flipper")
PAYLOAD_MODES = ("ofb", "cbc")


@dataclass(frozen=True)
class ChannelModel:
    """Independent per-bit flips plus whole-frame loss, seeded."""

    bit_error_rate: float = 0.0
    frame_loss_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name, p in (("bit_error_rate", self.bit_error_rate),
                        ("frame_loss_rate", self.frame_loss_rate)):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1], got {p}")


def transmit(channel: ChannelModel, frame: bytes, rng: SplitMix64) -> bytes | None:
    """One channel crossing: returns the delivered bytes, or None if lost.

    Consumes one uniform for the loss decision, then one per bit when the
    bit error rate is nonzero.
    """
    if rng.next_float() < channel.frame_loss_rate:
        return None
    ber = channel.bit_error_rate
    if ber == 0.0:
        return bytes(frame)
    out = bytearray(frame)
    for i in range(len(out)):
        b = out[i]
        for bit in range(8):
            if rng.next_float() < ber:
                b ^= 0x80 >> bit
        out[i] = b
    return bytes(out)


@dataclass(frozen=True)
class TrafficFlow:
    src: int
    dst: int
    payload_len: int
    count: int


@dataclass
class ScenarioConfig:
    nodes: tuple[int, ...]
    keys: dict[tuple[int, int], LinkKey]
    traffic: tuple[TrafficFlow, ...]
    channel: ChannelModel
    adversary: str = "none"
    secure_mode: str = MODE_AE
    payload_mode: str = "ofb"
    mac_verify: bool = True

    def validate(self) -> None:
        if self.adversary not in ADVERSARIES:
            raise ConfigError(f"unknown adversary {self.adversary!r}")
        if self.secure_mode not in (MODE_AE, MODE_AUTH):
            raise ConfigError(f"unknown mode {self.secure_mode!r}")
        if self.payload_mode not in PAYLOAD_MODES:
            raise ConfigError(f"unknown payload mode {self.payload_mode!r}")
        if not self.traffic:
            raise ConfigError("no traffic flows configured")
        for flow in self.traffic:
            if (flow.src, flow.dst) not in self.keys:
                raise ConfigError(f"no link key provisioned for {flow.src}->{flow.dst}")
            for addr in (flow.src, flow.dst):
                if self.nodes and addr not in self.nodes:
                    raise ConfigError(f"traffic references unknown node {addr}")
            if flow.count < 1 or flow.payload_len < 0:
                raise ConfigError("traffic flows need count >= 1 and len >= 0")
            body_len = flow.payload_len
            if self.payload_mode == "cbc" and self.secure_mode == MODE_AE:
                body_len = len(pad_iso(bytes(flow.payload_len)))
            if body_len > MAX_PAYLOAD:
                raise ConfigError(
                    f"flow {flow.src}->{flow.dst}: body of {body_len} bytes exceeds {MAX_PAYLOAD}"
                )


@dataclass
class ScenarioMetrics:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    accepted: int = 0
    rejected_bad_mac: int = 0
    rejected_replay: int = 0
    rejected_malformed: int = 0
    goodput_bytes: int = 0
    overhead_bytes: int = 0
    frames_with_flips: int = 0
    flipped_ciphertext_bits: int = 0
    corrupted_plaintext_bits: int = 0
    # flips-per-frame histogram: k -> [frames seen, plaintext bits corrupted]
    corruption_by_flips: dict[int, list[int]] = field(default_factory=dict)

    def conservation_ok(self) -> bool:
        rejections = self.rejected_bad_mac + self.rejected_replay + self.rejected_malformed
        return (self.sent == self.delivered + self.dropped
                and self.delivered == self.accepted + rejections)


def _bit_diff(a: bytes, b: bytes) -> int:
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).bit_count()


def _flip_one_bit(frame: bytes, rng: SplitMix64) -> bytes:
    pos = rng.next_below(len(frame) * 8)
    out = bytearray(frame)
    out[pos // 8] ^= 0x80 >> (pos % 8)
    return bytes(out)


def _seal_cbc(key: LinkKey, dst: int, src: int, payload: bytes, tx: LinkTxState) -> bytes:
    # Contrast leg: the padded-and-CBC-encrypted body expands the frame,
    # unlike the production OFB path.  Framing is otherwise identical.
    if tx.next_ctr > MAX_COUNTER:
        raise CounterWrapError("frame counter exhausted; rekey the link")
    padded = pad_iso(payload)
    header = header_for(MODE_AE, dst, src, len(padded), tx.next_ctr)
    tx.next_ctr += 1
    body = cbc_encrypt(key.enc_handle, build_iv(header), padded)
    header_bytes = header.to_bytes()
    return header_bytes + body + cbc_mac(key.mac_handle, header_bytes + body)


def _open_cbc(key: LinkKey, wire: bytes, replay: ReplayState) -> tuple[FrameHeader, bytes]:
    frame = verify_frame(key, wire)
    if not replay.check_update(frame.header.src, frame.header.ctr):
        raise ReplayRejected(
            f"counter {frame.header.ctr} not newer than last accepted from {frame.header.src}"
        )
    padded = cbc_decrypt(key.enc_handle, build_iv(frame.header), frame.body)
    try:
        return frame.header, unpad_iso(padded)
    except ValueError as exc:
        raise MalformedFrame(str(exc)) from exc


def _seal_flow_frame(config: ScenarioConfig, key: LinkKey, flow: TrafficFlow,
                     payload: bytes, tx: LinkTxState) -> bytes:
    if config.secure_mode == MODE_AE and config.payload_mode == "cbc":
        return _seal_cbc(key, flow.dst, flow.src, payload, tx)
    return seal(key, config.secure_mode, flow.dst, flow.src, payload, tx)


def _receive(config: ScenarioConfig, key: LinkKey, wire: bytes,
             replay: ReplayState, metrics: ScenarioMetrics) -> None:
    try:
        if config.secure_mode == MODE_AE and config.payload_mode == "cbc":
            _, payload = _open_cbc(key, wire, replay)
        else:
            _, payload = open_frame(key, wire, replay)
    except MalformedFrame:
        metrics.rejected_malformed += 1
    except BadMac:
        metrics.rejected_bad_mac += 1
    except ReplayRejected:
        metrics.rejected_replay += 1
    else:
        metrics.accepted += 1
        metrics.goodput_bytes += len(payload)


def _mode_layer_study(config: ScenarioConfig, key: LinkKey, wire: bytes,
                      payload: bytes, frame_rng: SplitMix64,
                      metrics: ScenarioMetrics) -> None:
    # MAC bypassed: only the body crosses the channel; decrypt with the
    # true IV and count corrupted plaintext bits against the original.
    header = FrameHeader.parse(wire[:HEADER_LEN])
    body = wire[HEADER_LEN:-TAG_LEN]
    delivered = transmit(config.channel, body, frame_rng)
    if delivered is None:
        metrics.dropped += 1
        return
    metrics.delivered += 1
    metrics.accepted += 1
    metrics.goodput_bytes += len(payload)
    flips = _bit_diff(body, delivered)
    if config.secure_mode != MODE_AE:
        recovered, baseline = delivered, payload
    elif config.payload_mode == "cbc":
        recovered = cbc_decrypt(key.enc_handle, build_iv(header), delivered)
        baseline = pad_iso(payload)
    else:
        recovered = ofb_process(key.enc_handle, build_iv(header), delivered)
        baseline = payload
    corrupted = _bit_diff(baseline, recovered)
    if flips:
        metrics.frames_with_flips += 1
        metrics.flipped_ciphertext_bits += flips
        metrics.corrupted_plaintext_bits += corrupted
    bucket = metrics.corruption_by_flips.setdefault(flips, [0, 0])
    bucket[0] += 1
    bucket[1] += corrupted


def run_scenario(config: ScenarioConfig) -> ScenarioMetrics:
    """Drive every traffic flow through the channel; returns the counters.

    Deterministic: a given config (seed included) always yields identical
    metrics.  Conservation (sent = delivered + dropped, delivered =
    accepted + rejections) is asserted before returning.
    """
    config.validate()
    metrics = ScenarioMetrics()
    root = SplitMix64(config.channel.seed)
    tx_states: dict[tuple[int, int], LinkTxState] = {}
    replay_states: dict[int, ReplayState] = {}
    for flow in config.traffic:
        flow_rng = root.spawn()
        key = config.keys[(flow.src, flow.dst)]
        tx = tx_states.setdefault((flow.src, flow.dst), LinkTxState())
        replay = replay_states.setdefault(flow.dst, ReplayState())
        for _ in range(flow.count):
            frame_rng = flow_rng.spawn()
            payload = frame_rng.next_bytes(flow.payload_len)
            wire = _seal_flow_frame(config, key, flow, payload, tx)
            metrics.sent += 1
            metrics.overhead_bytes += len(wire) - flow.payload_len
            if not config.mac_verify:
                _mode_layer_study(config, key, wire, payload, frame_rng, metrics)
                continue
            delivered = transmit(config.channel, wire, frame_rng)
            if delivered is None:
                metrics.dropped += 1
                continue
            if config.adversary == "bit_flipper":
                delivered = _flip_one_bit(delivered, frame_rng)
            metrics.delivered += 1
            _receive(config, key, delivered, replay, metrics)
            if config.adversary == "replayer":
                # Perfect-reception adversary: re-injects its copy verbatim.
                metrics.sent += 1
                metrics.delivered += 1
                metrics.overhead_bytes += len(delivered)
                _receive(config, key, delivered, replay, metrics)
    assert metrics.conservation_ok(), "frame accounting must balance"
    return metrics


# --- exhaustive error-propagation study ------------------------------------

@dataclass(frozen=True)
class PropagationStats:
    """Corrupted plaintext bits per single flipped ciphertext bit."""

    mode: str
    message_len: int
    ciphertext_len: int
    flip_positions: int
    min_corrupted: int
    mean_corrupted: float
    max_corrupted: int


@dataclass(frozen=True)
class PropagationReport:
    ofb: PropagationStats
    cbc: PropagationStats


def error_propagation_report(message_len: int, enc_key: bytes | None = None,
                             seed: int = 0) -> PropagationReport:
    """Flip every ciphertext bit in turn, decrypt, and tally the damage.

    Exhaustive over all positions, for both modes, on one deterministic
    message.  The CBC leg measures over the padded plaintext, since the
    padding block is transmitted and its errors are real; its ciphertext
    therefore has one more block than the message.
    """
    if message_len <= 0:
        raise ConfigError("message length must be positive")
    rng = SplitMix64(seed)
    message = rng.next_bytes(message_len)
    key = enc_key if enc_key is not None else rng.next_bytes(16)
    iv = rng.next_bytes(8)
    handle = BlockCipherHandle("misty1", key)

    def study(mode: str) -> PropagationStats:
        if mode == "ofb":
            reference = message
            ciphertext = ofb_process(handle, iv, message)
        else:
            reference = pad_iso(message)
            ciphertext = cbc_encrypt(handle, iv, reference)
        counts = []
        work = bytearray(ciphertext)
        for pos in range(len(ciphertext) * 8):
            work[pos // 8] ^= 0x80 >> (pos % 8)
            if mode == "ofb":
                recovered = ofb_process(handle, iv, bytes(work))
            else:
                recovered = cbc_decrypt(handle, iv, bytes(work))
            counts.append(_bit_diff(reference, recovered))
            work[pos // 8] ^= 0x80 >> (pos % 8)
        return PropagationStats(
            mode=mode,
            message_len=message_len,
            ciphertext_len=len(ciphertext),
            flip_positions=len(counts),
            min_corrupted=min(counts),
            mean_corrupted=sum(counts) / len(counts),
            max_corrupted=max(counts),
        )

    return PropagationReport(ofb=study("ofb"), cbc=study("cbc"))


# --- rendering --------------------------------------------------------------

def render_metrics(metrics: ScenarioMetrics) -> str:
    """Tab-separated counters followed by a short human-readable summary."""
    rows = [
        ("sent", metrics.sent),
        ("delivered", metrics.delivered),
        ("dropped", metrics.dropped),
        ("accepted", metrics.accepted),
        ("rejected_bad_mac", metrics.rejected_bad_mac),
        ("rejected_replay", metrics.rejected_replay),
        ("rejected_malformed", metrics.rejected_malformed),
        ("goodput_bytes", metrics.goodput_bytes),
        ("overhead_bytes", metrics.overhead_bytes),
        ("frames_with_flips", metrics.frames_with_flips),
        ("flipped_ciphertext_bits", metrics.flipped_ciphertext_bits),
        ("corrupted_plaintext_bits", metrics.corrupted_plaintext_bits),
    ]
    lines = [f"{name}\t{value}" for name, value in rows]
    for k in sorted(metrics.corruption_by_flips):
        frames, corrupted = metrics.corruption_by_flips[k]
        lines.append(f"flips[{k}]\tframes={frames}\tcorrupted_bits={corrupted}")
    lines.append("")
    lines.append(f"# {metrics.accepted}/{metrics.sent} frames accepted, "
                 f"{metrics.dropped} lost in channel")
    if metrics.flipped_ciphertext_bits:
        ratio = metrics.corrupted_plaintext_bits / metrics.flipped_ciphertext_bits
        lines.append(f"# {ratio:.4f} corrupted plaintext bits per flipped ciphertext bit")
    return "\n".join(lines) + "\n"


def render_propagation(report: PropagationReport) -> str:
    header = "mode\tmessage_len\tciphertext_len\tflip_positions\tmin\tmean\tmax"
    lines = [header]
    for stats in (report.ofb, report.cbc):
        lines.append(
            f"{stats.mode}\t{stats.message_len}\t{stats.ciphertext_len}\t"
            f"{stats.flip_positions}\t{stats.min_corrupted}\t"
            f"{stats.mean_corrupted:.6f}\t{stats.max_corrupted}"
        )
    return "\n".join(lines) + "\n"


# --- scenario files ---------------------------------------------------------

_SECTIONS = ("scenario", "channel", "nodes", "keys", "traffic", "adversary")


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse the line-oriented ``key = value`` scenario format.

    Sections: [nodes] addresses; [keys] src->dst = enc mac; [traffic]
    src->dst = len=N count=M (repeatable, order preserved); [channel]
    rates and seed; [adversary] kind; [scenario] mode/payload_mode/
    mac_verify.  Raises ParseError with the offending line number.
    """
    nodes: tuple[int, ...] = ()
    keys: dict[tuple[int, int], LinkKey] = {}
    traffic: list[TrafficFlow] = []
    channel_opts: dict[str, str] = {}
    scenario_opts: dict[str, str] = {}
    adversary = "none"
    section = None

    def parse_pair(token: str, line_no: int) -> tuple[int, int]:
        if "->" not in token:
            raise ParseError(f"expected '<src>-><dst>', got {token!r}", line_no)
        left, _, right = token.partition("->")
        try:
            return int(left), int(right)
        except ValueError:
            raise ParseError(f"bad link addresses in {token!r}", line_no) from None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line_no)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ParseError(f"unknown section [{section}]", line_no)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line_no)
        if section is None:
            raise ParseError("directive outside any section", line_no)
        name, _, value = line.partition("=")
        name = name.strip()
        value = value.strip()
        if section == "nodes":
            if name != "addresses":
                raise ParseError(f"unknown nodes key {name!r}", line_no)
            try:
                nodes = tuple(int(tok) for tok in value.split())
            except ValueError:
                raise ParseError("addresses must be integers", line_no) from None
        elif section == "keys":
            pair = parse_pair(name, line_no)
            parts = value.split()
            if len(parts) != 2:
                raise ParseError("expected '<enc hex> <mac hex>'", line_no)
            try:
                key = LinkKey(bytes.fromhex(parts[0]), bytes.fromhex(parts[1]))
            except ValueError as exc:
                raise ParseError(f"bad link key: {exc}", line_no) from None
            if pair in keys:
                raise ParseError(f"duplicate key for {name}", line_no)
            keys[pair] = key
        elif section == "traffic":
            pair = parse_pair(name, line_no)
            opts = dict(tok.split("=", 1) for tok in value.split() if "=" in tok)
            if set(opts) != {"len", "count"}:
                raise ParseError("expected 'len=<n> count=<m>'", line_no)
            try:
                traffic.append(TrafficFlow(pair[0], pair[1], int(opts["len"]), int(opts["count"])))
            except ValueError:
                raise ParseError("len and count must be integers", line_no) from None
        elif section == "channel":
            if name not in ("bit_error_rate", "frame_loss_rate", "seed"):
                raise ParseError(f"unknown channel key {name!r}", line_no)
            channel_opts[name] = value
        elif section == "adversary":
            if name != "kind":
                raise ParseError(f"unknown adversary key {name!r}", line_no)
            adversary = value
        elif section == "scenario":
            if name not in ("mode", "payload_mode", "mac_verify"):
                raise ParseError(f"unknown scenario key {name!r}", line_no)
            scenario_opts[name] = value

    try:
        channel = ChannelModel(
            bit_error_rate=float(channel_opts.get("bit_error_rate", "0")),
            frame_loss_rate=float(channel_opts.get("frame_loss_rate", "0")),
            seed=int(channel_opts.get("seed", "0")),
        )
    except ValueError as exc:
        raise ConfigError(f"bad channel setting: {exc}") from None

    mac_verify_raw = scenario_opts.get("mac_verify", "on").lower()
    if mac_verify_raw not in ("on", "off"):
        raise ConfigError("mac_verify must be 'on' or 'off'")

    config = ScenarioConfig(
        nodes=nodes,
        keys=keys,
        traffic=tuple(traffic),
        channel=channel,
        adversary=adversary,
        secure_mode=scenario_opts.get("mode", MODE_AE),
        payload_mode=scenario_opts.get("payload_mode", "ofb"),
        mac_verify=mac_verify_raw == "on",
    )
    config.validate()
    return config


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
