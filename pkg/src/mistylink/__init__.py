"""Link-layer frame security for constrained radio networks.

MISTY1 keystreaming (OFB) for payload secrecy, a truncated CBC-MAC tag for
authentication, counter-derived IVs with strict replay rejection, plus a
deterministic lossy-channel simulator and a cipher benchmark harness.
Skipjack and RC5-32/12/16 ship alongside MISTY1 as benchmark baselines.
"""

from .ciphers import (
    misty1_decrypt_block,
    misty1_encrypt_block,
    misty1_expand_key,
    misty1_fi,
    rc5_block,
    skipjack_block,
)
from .errors import (
    BadMac,
    BlockAlignmentError,
    ConfigError,
    CounterWrapError,
    KeyLengthError,
    MalformedFrame,
    MistyLinkError,
    ParseError,
    PayloadLengthError,
    ReplayRejected,
)
from .linklayer import (
    FrameHeader,
    LinkKey,
    LinkTxState,
    ReplayState,
    SecuredFrame,
    build_iv,
    generate_link_key,
    open_frame,
    replay_check_update,
    seal,
    verify_frame,
)
from .mac import cbc_mac
from .modes import BlockCipherHandle, cbc_decrypt, cbc_encrypt, ofb_process, pad_iso, unpad_iso

__version__ = "0.1.0"
