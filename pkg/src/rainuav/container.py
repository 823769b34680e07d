"""Binary artifact framing: magic line, length-prefixed JSON header, raw payload.

The header always carries ``schema_version`` and ``payload_sha256``; readers
verify both before handing back the payload bytes.
"""

from __future__ import annotations

import hashlib
import json
import struct

from .errors import FormatError


def write_container(path, magic: bytes, header: dict, payload: bytes) -> None:
    header = dict(header, payload_sha256=hashlib.sha256(payload).hexdigest())
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)


def read_container(path, magic: bytes, schema_version: int, kind: str) -> tuple[dict, bytes]:
    """Header dict and verified payload bytes of a container file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(magic):
        raise FormatError(f"{path}: not {kind} file")
    try:
        offset = len(magic)
        (n,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + n > len(data):
            raise FormatError(f"{path}: truncated header")
        header = json.loads(data[offset : offset + n].decode())
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable header ({exc})") from exc
    if not isinstance(header, dict):
        raise FormatError(f"{path}: header is not a mapping")
    if header.get("schema_version") != schema_version:
        raise FormatError(
            f"{path}: unsupported schema version {header.get('schema_version')!r}, expected {schema_version}"
        )
    payload = data[offset + n :]
    if hashlib.sha256(payload).hexdigest() != header.get("payload_sha256"):
        raise FormatError(f"{path}: payload checksum mismatch")
    return header, payload
