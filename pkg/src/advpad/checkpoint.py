"""Versioned checkpoint container: JSON header + torch payload.

Layout: magic b"ADVP", u16 format version, u32 header length, UTF-8 JSON
header, then a torch.save blob. The header carries the model kind, its
dimensions, and a content hash of the payload (the policy_version tag).
"""

from __future__ import annotations

import hashlib
import io
import json
import struct

import torch

from .errors import ConfigError

MAGIC = b"ADVP"
FORMAT_VERSION = 1


def save_checkpoint(path, kind: str, header: dict, state_dict) -> str:
    buf = io.BytesIO()
    torch.save(state_dict, buf)
    payload = buf.getvalue()
    version = hashlib.sha256(payload).hexdigest()[:12]
    full_header = dict(header)
    full_header["kind"] = kind
    full_header["policy_version"] = version
    header_bytes = json.dumps(full_header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<HI", FORMAT_VERSION, len(header_bytes)))
        f.write(header_bytes)
        f.write(payload)
    return version


def load_checkpoint(path, expect_kind: str | None = None) -> tuple[dict, dict]:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise ConfigError("not an advpad checkpoint: %s" % path)
    fmt, header_len = struct.unpack("<HI", blob[4:10])
    if fmt != FORMAT_VERSION:
        raise ConfigError("unsupported checkpoint format version %d" % fmt)
    header = json.loads(blob[10 : 10 + header_len].decode("utf-8"))
    payload = blob[10 + header_len :]
    if expect_kind is not None and header.get("kind") != expect_kind:
        raise ConfigError(
            "checkpoint kind %r, expected %r" % (header.get("kind"), expect_kind)
        )
    state_dict = torch.load(io.BytesIO(payload), map_location="cpu", weights_only=True)
    return header, state_dict
