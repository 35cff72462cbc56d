"""Vector file parsing and the shipped regression vectors."""

import pytest

from mistylink import vectors
from mistylink.errors import ParseError


def test_shipped_vectors_all_pass():
    results = vectors.run_vector_files()
    assert len(results) == 6
    assert all(ok for _, ok in results)


def test_parse_cipher_vectors_line_numbers_on_error():
    text = "misty1 00112233445566778899aabbccddeeff 0123456789abcdef\n"
    with pytest.raises(ParseError) as excinfo:
        vectors.parse_cipher_vectors(text)
    assert excinfo.value.line == 1


def test_parse_rejects_unknown_cipher():
    with pytest.raises(ParseError):
        vectors.parse_cipher_vectors("des 00 0000000000000000 0000000000000000\n")


def test_parse_rejects_bad_hex():
    with pytest.raises(ParseError):
        vectors.parse_cipher_vectors(
            "misty1 zz112233445566778899aabbccddeeff 0123456789abcdef 8b1da5f56ab3d07c\n"
        )


def test_corrupted_ciphertext_nibble_fails_cleanly():
    good = "misty1 00112233445566778899aabbccddeeff 0123456789abcdef 8b1da5f56ab3d07c\n"
    bad = good.replace("8b1da5f5", "8b1da5f4")
    (vec,) = vectors.parse_cipher_vectors(bad)
    assert vectors.check_cipher_vector(vec) is False
    (vec,) = vectors.parse_cipher_vectors(good)
    assert vectors.check_cipher_vector(vec) is True


def test_frame_vector_dash_means_empty_payload():
    line = ("000102030405060708090a0b0c0d0e0f f0e0d0c0b0a090807060504030201000 "
            "ae 10 20 99 - 000a0014010000000063b05ad843\n")
    (vec,) = vectors.parse_frame_vectors(line)
    assert vec.payload == b""
    assert vectors.check_frame_vector(vec) is True


def test_frame_vector_detects_wire_mismatch():
    line = ("00112233445566778899aabbccddeeff ffeeddccbbaa99887766554433221100 "
            "ae 1 2 1 48454c4c4f 00010002010500000001e2d5c32e716be8e598\n")
    (vec,) = vectors.parse_frame_vectors(line)
    assert vectors.check_frame_vector(vec) is False


def test_comments_and_blanks_are_skipped():
    assert vectors.parse_cipher_vectors("# nothing\n\n   \n") == []
