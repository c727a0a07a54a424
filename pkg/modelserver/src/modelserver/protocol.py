"""Wire protocol: newline-delimited JSON prediction requests and responses.

Request:  {"id": "<string>", "image_png_b64": "<base64 PNG>"}
Response: {"id": "<same string>", "label": "<string>"}
Error:    {"id": "<same string>", "error": "<message>"}

The same body travels over a child process's stdio (one object per line) or
HTTP POST (one object per request). Response key order and separators are
fixed so transcripts are reproducible byte for byte.
"""

from __future__ import annotations

import base64
import binascii
import io
import json

import numpy as np
from PIL import Image


def decode_image(b64: str) -> np.ndarray:
    """Base64 PNG payload -> uint8 RGB array."""
    try:
        raw = base64.b64decode(b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise ValueError(f"invalid base64 payload: {exc}") from exc
    try:
        with Image.open(io.BytesIO(raw)) as img:
            return np.ascontiguousarray(np.asarray(img.convert("RGB"), dtype=np.uint8))
    except Exception as exc:
        raise ValueError(f"cannot decode PNG: {exc}") from exc


def label_response(req_id: str, label: str) -> str:
    return json.dumps({"id": req_id, "label": label})


def error_response(req_id: str, message: str) -> str:
    return json.dumps({"id": req_id, "error": message})


def handle_request_line(line: str, predict) -> str:
    """Answer one request line; never raises (failures become error bodies)."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return error_response("unknown", f"malformed JSON: {exc}")
    req_id = msg.get("id") if isinstance(msg, dict) else None
    if not isinstance(req_id, str):
        return error_response("unknown", "request must carry a string id")
    payload = msg.get("image_png_b64")
    if not isinstance(payload, str):
        return error_response(req_id, "request must carry image_png_b64")
    try:
        image = decode_image(payload)
        return label_response(req_id, predict(image))
    except Exception as exc:
        return error_response(req_id, str(exc))
