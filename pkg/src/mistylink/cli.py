"""Command-line front end.  All cryptographic work is delegated to the
library modules; the CLI only parses arguments, moves bytes, and maps
errors to exit codes:

    0  success
    1  vector or ranking check failed
    2  malformed frame
    3  authentication tag mismatch
    4  replay rejected
    5  usage, configuration, key, or counter errors

Hex arguments are case-insensitive in, lowercase out.  ``--out`` switches
byte outputs from hex-on-stdout to a binary file.
"""

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from . import simnet, vectors
from .errors import (
    BadMac,
    ConfigError,
    MalformedFrame,
    MistyLinkError,
    ReplayRejected,
)
from .linklayer import (
    LinkKey,
    LinkTxState,
    ReplayState,
    generate_link_key,
    open_frame,
    seal,
)
from .mac import cbc_mac
from .modes import BlockCipherHandle

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_MALFORMED = 2
EXIT_BAD_MAC = 3
EXIT_REPLAY = 4
EXIT_USAGE = 5


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; 2 is taken by MalformedFrame.
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _hex_arg(value: str, name: str, length: int | None = None) -> bytes:
    try:
        data = bytes.fromhex(value)
    except ValueError:
        raise ConfigError(f"{name} must be an even-length hex string") from None
    if length is not None and len(data) != length:
        raise ConfigError(f"{name} must be {length} bytes ({2 * length} hex digits)")
    return data


def _link_key(args) -> LinkKey:
    return LinkKey(_hex_arg(args.key_enc, "--key-enc", 16),
                   _hex_arg(args.key_mac, "--key-mac", 16))


def _read_bytes(hex_value: str | None, file_path: str | None, name: str) -> bytes:
    if file_path is not None:
        return Path(file_path).read_bytes()
    return _hex_arg(hex_value or "", name)


def _emit(out_path: str | None, data: bytes) -> None:
    if out_path:
        Path(out_path).write_bytes(data)
    else:
        print(data.hex())


def _load_tx_state(path: str) -> LinkTxState:
    p = Path(path)
    if not p.exists():
        return LinkTxState()
    text = p.read_text(encoding="utf-8").strip()
    prefix, _, value = text.partition("=")
    if prefix.strip() != "next_ctr":
        raise ConfigError(f"state file {path} must contain 'next_ctr=<decimal>'")
    try:
        return LinkTxState(next_ctr=int(value))
    except ValueError:
        raise ConfigError(f"state file {path}: bad counter {value!r}") from None


def _save_tx_state(path: str, tx: LinkTxState) -> None:
    Path(path).write_text(f"next_ctr={tx.next_ctr}\n", encoding="utf-8")


def _load_replay_state(path: str) -> ReplayState:
    state = ReplayState()
    p = Path(path)
    if not p.exists():
        return state
    for line_no, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            src, ctr = int(parts[0]), int(parts[1])
        except (IndexError, ValueError):
            raise ConfigError(f"replay state {path} line {line_no}: expected '<src> <ctr>'") from None
        state.highest[src] = ctr
    return state


def _save_replay_state(path: str, state: ReplayState) -> None:
    lines = [f"{src} {ctr}" for src, ctr in sorted(state.highest.items())]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


# --- subcommands ------------------------------------------------------------

def cmd_keygen(args) -> int:
    key = generate_link_key(args.seed)
    print(f"enc={key.enc_key.hex()} mac={key.mac_key.hex()}")
    return EXIT_OK


def cmd_seal(args) -> int:
    key = _link_key(args)
    payload = _read_bytes(args.payload, args.payload_file, "--payload")
    tx = _load_tx_state(args.state) if args.state else LinkTxState(next_ctr=args.ctr)
    wire = seal(key, args.mode, args.dst, args.src, payload, tx)
    if args.state:
        _save_tx_state(args.state, tx)
    _emit(args.out, wire)
    return EXIT_OK


def cmd_open(args) -> int:
    key = _link_key(args)
    if args.frame_file is not None:
        wire = Path(args.frame_file).read_bytes()
    else:
        try:
            wire = bytes.fromhex(args.frame or "")
        except ValueError:
            raise MalformedFrame("--frame is not an even-length hex string") from None
    replay = _load_replay_state(args.state) if args.state else ReplayState()
    header, payload = open_frame(key, wire, replay)
    if args.state:
        _save_replay_state(args.state, replay)
    print(f"dst={header.dst} src={header.src} mode={header.mode} ctr={header.ctr}",
          file=sys.stderr)
    _emit(args.out, payload)
    return EXIT_OK


def cmd_mac(args) -> int:
    handle = BlockCipherHandle("misty1", _hex_arg(args.key_mac, "--key-mac", 16))
    message = _read_bytes(args.message, args.message_file, "--message")
    print(cbc_mac(handle, message).hex())
    return EXIT_OK


def cmd_vectors(args) -> int:
    try:
        results = vectors.run_vector_files(args.cipher_file, args.frame_file)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for name, ok in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    if not results:
        print("0 vectors")
        print("warning: no vectors found", file=sys.stderr)
        return EXIT_OK
    failed = sum(1 for _, ok in results if not ok)
    print(f"{len(results) - failed}/{len(results)} vectors passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def cmd_simulate(args) -> int:
    if args.error_propagation is not None:
        key = _hex_arg(args.key, "--key", 16) if args.key else None
        report = simnet.error_propagation_report(args.error_propagation,
                                                 enc_key=key, seed=args.seed)
        text = simnet.render_propagation(report)
    else:
        if not args.scenario:
            raise ConfigError("a scenario path (or --error-propagation) is required")
        config = simnet.load_scenario(args.scenario)
        metrics = simnet.run_scenario(config)
        text = simnet.render_metrics(metrics)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.paper_tables:
        report, match = bench_mod.published_ranking_check()
        text = bench_mod.render_rank_report(report)
        text += f"published ranking reproduced: {'yes' if match else 'NO'}\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            print(text, end="")
        return EXIT_OK if match else EXIT_CHECK_FAILED

    records = [
        bench_mod.bench_cipher_mode(cipher, mode, args.payload_size,
                                    args.iterations, profile)
        for cipher in (args.cipher or ["misty1"])
        for mode in (args.mode or ["ofb"])
        for profile in (args.profile or ["size"])
    ]
    chunks = [bench_mod.render_record(r) for r in records]
    if args.rank:
        chunks.append(bench_mod.render_rank_report(bench_mod.rank_report(records)))
    text = "\n".join(chunks)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mistylink", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a link key pair")
    p.add_argument("--seed", type=int, help="deterministic generation from a 64-bit seed")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("seal", help="protect a payload into a wire frame")
    p.add_argument("--key-enc", required=True, help="16-byte encryption key, hex")
    p.add_argument("--key-mac", required=True, help="16-byte MAC key, hex")
    p.add_argument("--mode", choices=["ae", "auth"], default="ae")
    p.add_argument("--dst", type=int, required=True)
    p.add_argument("--src", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ctr", type=int, help="explicit frame counter")
    g.add_argument("--state", help="counter state file (next_ctr=<decimal>)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--payload", help="payload, hex")
    g.add_argument("--payload-file", help="payload, binary file")
    p.add_argument("--out", help="write the frame to a binary file instead of hex stdout")
    p.set_defaults(func=cmd_seal)

    p = sub.add_parser("open", help="verify a wire frame and recover its payload")
    p.add_argument("--key-enc", required=True)
    p.add_argument("--key-mac", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--frame", help="wire frame, hex")
    g.add_argument("--frame-file", help="wire frame, binary file")
    p.add_argument("--state", help="replay state file (lines of '<src> <ctr>')")
    p.add_argument("--out", help="write the payload to a binary file instead of hex stdout")
    p.set_defaults(func=cmd_open)

    p = sub.add_parser("mac", help="compute the 4-byte tag over a message")
    p.add_argument("--key-mac", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--message", help="message, hex (may be empty)")
    g.add_argument("--message-file", help="message, binary file")
    p.set_defaults(func=cmd_mac)

    p = sub.add_parser("vectors", help="run the shipped cipher and frame vectors")
    p.add_argument("--cipher-file", help="override the cipher vector file")
    p.add_argument("--frame-file", help="override the frame vector file")
    p.set_defaults(func=cmd_vectors)

    p = sub.add_parser("simulate", help="run a channel scenario or error study")
    p.add_argument("scenario", nargs="?", help="scenario file path")
    p.add_argument("--error-propagation", type=int, metavar="LEN",
                   help="exhaustive single-bit-flip study for a LEN-byte message")
    p.add_argument("--seed", type=int, default=0, help="study seed (with --error-propagation)")
    p.add_argument("--key", help="study key, hex (with --error-propagation)")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="measure ciphers/modes or replay published tables")
    p.add_argument("--paper-tables", action="store_true",
                   help="rank the shipped published tables and check the reproduction")
    p.add_argument("--cipher", action="append", choices=["misty1", "skipjack", "rc5-32"])
    p.add_argument("--mode", action="append", choices=["ofb", "cbc"])
    p.add_argument("--profile", action="append", choices=["size", "speed"])
    p.add_argument("--payload-size", type=int, default=1024)
    p.add_argument("--iterations", type=int, default=16)
    p.add_argument("--rank", action="store_true", help="also rank the measured records")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # raised by argparse for --help and usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MalformedFrame as exc:
        print(f"error: malformed frame: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except BadMac as exc:
        print(f"error: bad MAC: {exc}", file=sys.stderr)
        return EXIT_BAD_MAC
    except ReplayRejected as exc:
        print(f"error: replay rejected: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    except (MistyLinkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
