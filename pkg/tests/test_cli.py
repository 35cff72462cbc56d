"""CLI behavior: exit codes, state files, determinism, and delegation."""

import random
from importlib import resources

from mistylink import cli
from mistylink.linklayer import LinkKey, LinkTxState, seal

ENC = "00112233445566778899aabbccddeeff"
MAC = "ffeeddccbbaa99887766554433221100"
GOLDEN_AE = "00010002010500000001e2d5c32e716be8e599"


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def scenario_path(name: str) -> str:
    return str(resources.files("mistylink").joinpath(f"data/scenarios/{name}"))


# --- keygen ----------------------------------------------------------------

def test_keygen_seeded_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "keygen", "--seed", "42")
    code2, out2, _ = run(capsys, "keygen", "--seed", "42")
    assert code1 == code2 == 0
    assert out1 == out2
    enc_part, mac_part = out1.strip().split()
    assert enc_part.startswith("enc=") and mac_part.startswith("mac=")
    LinkKey(bytes.fromhex(enc_part[4:]), bytes.fromhex(mac_part[4:]))


def test_keygen_unseeded_runs_differ(capsys):
    outputs = {run(capsys, "keygen")[1] for _ in range(10)}
    assert len(outputs) == 10


# --- seal / open -------------------------------------------------------------

def test_seal_reproduces_golden_frame(capsys):
    code, out, _ = run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
                       "--mode", "ae", "--dst", "1", "--src", "2",
                       "--ctr", "1", "--payload", "48454c4c4f")
    assert code == 0
    assert out.strip() == GOLDEN_AE


def test_open_recovers_payload(capsys):
    code, out, err = run(capsys, "open", "--key-enc", ENC, "--key-mac", MAC,
                         "--frame", GOLDEN_AE)
    assert code == 0
    assert out.strip() == "48454c4c4f"
    assert "ctr=1" in err


def test_open_is_case_insensitive_on_hex(capsys):
    code, out, _ = run(capsys, "open", "--key-enc", ENC.upper(), "--key-mac", MAC,
                       "--frame", GOLDEN_AE.upper())
    assert code == 0
    assert out.strip() == "48454c4c4f"


def test_open_truncated_frame_exits_2(capsys):
    code, _, err = run(capsys, "open", "--key-enc", ENC, "--key-mac", MAC,
                       "--frame", GOLDEN_AE[:20])
    assert code == 2
    assert "malformed" in err.lower()


def test_open_corrupted_frame_exits_3(capsys):
    bad = GOLDEN_AE[:-2] + ("00" if GOLDEN_AE[-2:] != "00" else "01")
    code, _, _ = run(capsys, "open", "--key-enc", ENC, "--key-mac", MAC, "--frame", bad)
    assert code == 3


def test_seal_state_file_advances_counter(tmp_path, capsys):
    state = tmp_path / "tx.state"
    code1, out1, _ = run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
                         "--dst", "1", "--src", "2", "--state", str(state),
                         "--payload", "aa")
    code2, out2, _ = run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
                         "--dst", "1", "--src", "2", "--state", str(state),
                         "--payload", "aa")
    assert code1 == code2 == 0
    assert out1 != out2  # fresh counter, fresh IV, fresh frame
    assert state.read_text() == "next_ctr=3\n"


def test_open_shared_state_file_rejects_replay(tmp_path, capsys):
    state = tmp_path / "replay.state"
    args = ("open", "--key-enc", ENC, "--key-mac", MAC,
            "--frame", GOLDEN_AE, "--state", str(state))
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args)[0] == 4
    assert state.read_text() == "2 1\n"


def test_binary_payload_and_frame_files(tmp_path, capsys):
    payload_file = tmp_path / "payload.bin"
    payload_file.write_bytes(b"HELLO")
    frame_file = tmp_path / "frame.bin"
    code, out, _ = run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
                       "--dst", "1", "--src", "2", "--ctr", "1",
                       "--payload-file", str(payload_file), "--out", str(frame_file))
    assert code == 0
    assert out == ""
    assert frame_file.read_bytes().hex() == GOLDEN_AE
    recovered = tmp_path / "payload.out"
    code, _, _ = run(capsys, "open", "--key-enc", ENC, "--key-mac", MAC,
                     "--frame-file", str(frame_file), "--out", str(recovered))
    assert code == 0
    assert recovered.read_bytes() == b"HELLO"


def test_cli_delegates_sealing_to_the_library(capsys):
    rnd = random.Random(40)
    key = LinkKey(bytes.fromhex(ENC), bytes.fromhex(MAC))
    for _ in range(100):
        dst, src = rnd.randrange(1, 100), rnd.randrange(1, 100)
        ctr = rnd.randrange(1, 1 << 20)
        payload = rnd.randbytes(rnd.randrange(0, 24))
        mode = rnd.choice(["ae", "auth"])
        code, out, _ = run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
                           "--mode", mode, "--dst", str(dst), "--src", str(src),
                           "--ctr", str(ctr), "--payload", payload.hex())
        assert code == 0
        expected = seal(key, mode, dst, src, payload, LinkTxState(next_ctr=ctr))
        assert out.strip() == expected.hex()


# --- mac -----------------------------------------------------------------------

def test_mac_subcommand_frozen_tag(capsys):
    code, out, _ = run(capsys, "mac", "--key-mac", ENC,
                       "--message", "00010002010500000001")
    assert code == 0
    assert out.strip() == "5ae0e65d"


def test_mac_empty_message(capsys):
    code, out, _ = run(capsys, "mac", "--key-mac", MAC, "--message", "")
    assert code == 0
    assert out.strip() == "332b7fdd"


# --- vectors ---------------------------------------------------------------------

def test_vectors_pass_on_pristine_checkout(capsys):
    code, out, _ = run(capsys, "vectors")
    assert code == 0
    assert "6/6 vectors passed" in out
    assert out.count("ok  ") == 6


def test_vectors_detect_corruption(tmp_path, capsys):
    bad = tmp_path / "cipher_vectors.txt"
    bad.write_text(
        "misty1 00112233445566778899aabbccddeeff 0123456789abcdef 8b1da5f56ab3d07d\n"
    )
    code, out, _ = run(capsys, "vectors", "--cipher-file", str(bad))
    assert code == 1
    assert "FAIL" in out


def test_vectors_empty_files_warn_but_pass(tmp_path, capsys):
    empty = tmp_path / "none.txt"
    empty.write_text("# nothing here\n")
    code, out, err = run(capsys, "vectors", "--cipher-file", str(empty),
                         "--frame-file", str(empty))
    assert code == 0
    assert "0 vectors" in out
    assert "warning" in err.lower()


def test_vectors_missing_file_is_usage_error(capsys):
    code, _, _ = run(capsys, "vectors", "--cipher-file", "/does/not/exist.txt")
    assert code == 5


# --- simulate ----------------------------------------------------------------------

def test_simulate_shipped_scenario_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "simulate", scenario_path("clean.scn"))
    code2, out2, _ = run(capsys, "simulate", scenario_path("clean.scn"))
    assert code1 == code2 == 0
    assert out1 == out2
    assert "accepted\t100" in out1


def test_simulate_replay_scenario_counts(capsys):
    code, out, _ = run(capsys, "simulate", scenario_path("replay.scn"))
    assert code == 0
    assert "accepted\t1000" in out
    assert "rejected_replay\t1000" in out


def test_simulate_error_propagation(capsys):
    code, out, _ = run(capsys, "simulate", "--error-propagation", "32")
    assert code == 0
    assert out.splitlines()[1].startswith("ofb\t32\t32\t256\t1\t1.000000\t1")


def test_simulate_bad_scenario_exits_5(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("[traffic]\nnot a directive\n")
    code, _, err = run(capsys, "simulate", str(bad))
    assert code == 5
    assert "line 2" in err


def test_simulate_requires_scenario_or_study(capsys):
    assert run(capsys, "simulate")[0] == 5


# --- bench --------------------------------------------------------------------------

def test_bench_paper_tables_reproduction(capsys):
    code, out, _ = run(capsys, "bench", "--paper-tables")
    assert code == 0
    assert "published ranking reproduced: yes" in out
    assert "rc5-32" in out and "rijndael" in out


def test_bench_measured_record(capsys):
    code, out, _ = run(capsys, "bench", "--cipher", "misty1", "--mode", "ofb",
                       "--payload-size", "64", "--iterations", "2")
    assert code == 0
    assert "cipher\tmisty1" in out
    assert "data_memory\t40" in out


# --- usage --------------------------------------------------------------------------

def test_usage_errors_exit_5(capsys):
    assert run(capsys, "seal", "--key-enc", "xx")[0] == 5       # missing args
    assert run(capsys, "nonsense")[0] == 5                       # unknown command
    assert run(capsys, "seal", "--key-enc", "zz" * 16, "--key-mac", MAC,
               "--dst", "1", "--src", "2", "--ctr", "1", "--payload", "aa")[0] == 5
    assert run(capsys, "seal", "--key-enc", ENC, "--key-mac", MAC,
               "--dst", "1", "--src", "2", "--ctr", "1",
               "--payload", "aa", "--state", "x")[0] == 5        # ctr and state clash


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
