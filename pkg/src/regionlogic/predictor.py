"""Black-box predictor interfaces.

Labels are opaque non-empty strings compared by exact equality. Predictors
come in two flavors:

  - image predictors answer on composed RGB images (remote protocol clients,
    the pixel-probing synthetic model);
  - state-channel models answer on the state bitmask directly (the synthetic
    logic model), bypassing pixel decoding so oracle tests are exact.

:class:`StateLabeler` is the engine both refinement strategies drive: it
resolves state bitmasks to labels, consulting the per-image cache first and
batching misses through the model.
"""

from __future__ import annotations

import base64
import hashlib
import json
import queue
import random
import shlex
import subprocess
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import requests

from .composer import FillPolicy, compose, image_to_png
from .errors import (
    DimensionMismatchError,
    MalformedResponseError,
    PredictorTimeoutError,
    RemoteModelError,
    TransportError,
)
from .logic import LogicExpr, Literal, conjunction, disjunction, eval_bits, max_literal
from .regions import RegionPartition
from .states import StateVector


class ImagePredictor(ABC):
    """A predictor answering hard labels on RGB images."""

    @abstractmethod
    def predict_batch(self, images: Sequence[np.ndarray]) -> list[str]:
        """Labels positionally aligned with ``images``; aborts on any failure."""

    def predict(self, image: np.ndarray) -> str:
        return self.predict_batch([image])[0]

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def predict(model, image: np.ndarray) -> str:
    """Label for one image."""
    return predict_batch(model, [image])[0]


def predict_batch(model, images: Sequence[np.ndarray]) -> list[str]:
    """Labels for a batch; equivalent to mapping :func:`predict`."""
    if len(images) == 0:
        raise ValueError("predict_batch requires a non-empty batch")
    batcher = getattr(model, "predict_batch", None)
    if batcher is None:
        raise TypeError(
            f"{type(model).__name__} does not predict on images; "
            "drive state-channel models through StateLabeler"
        )
    labels = batcher(list(images))
    if len(labels) != len(images):
        raise MalformedResponseError(
            f"expected {len(images)} labels, got {len(labels)}"
        )
    return labels


def _check_labels(target_label: str, other_label: str):
    if not target_label or not other_label:
        raise ValueError("labels must be non-empty strings")
    if target_label == other_label:
        raise ValueError("target and other labels must differ")


@dataclass(frozen=True)
class SyntheticLogicModel:
    """Test predictor: target label iff the preserved regions satisfy a formula.

    Inspects the state directly (no pixels involved), which makes it an exact
    oracle for the search; :class:`PixelProbeModel` is the variant that takes
    the full composer + transport path.
    """

    formula: LogicExpr
    region_count: int
    target_label: str = "target"
    other_label: str = "other"

    def __post_init__(self):
        _check_labels(self.target_label, self.other_label)
        if max_literal(self.formula) > self.region_count:
            raise ValueError(
                f"formula references region {max_literal(self.formula)} "
                f"but the model covers only {self.region_count}"
            )

    def predict_state(self, state: StateVector) -> str:
        if state.region_count != self.region_count:
            raise DimensionMismatchError(
                f"state covers {state.region_count} regions, model expects {self.region_count}"
            )
        if eval_bits(self.formula, state.bits, self.region_count):
            return self.target_label
        return self.other_label


class PixelProbeModel(ImagePredictor):
    """Synthetic predictor that re-derives the state from composed pixels.

    A region counts as preserved when its pixels are bit-identical to the
    original image, so region content must differ from the fill color
    somewhere for the decode to be exact.
    """

    def __init__(
        self,
        formula: LogicExpr,
        image: np.ndarray,
        partition: RegionPartition,
        target_label: str = "target",
        other_label: str = "other",
    ):
        _check_labels(target_label, other_label)
        if max_literal(formula) > partition.region_count:
            raise ValueError("formula references a region outside the partition")
        if image.shape[:2] != partition.labels.shape:
            raise DimensionMismatchError("image and partition sizes differ")
        self._formula = formula
        self._region_count = partition.region_count
        self._target = target_label
        self._other = other_label
        self._masks = [partition.region_mask(i) for i in range(1, partition.region_count + 1)]
        self._originals = [np.asarray(image)[m] for m in self._masks]

    def predict_batch(self, images: Sequence[np.ndarray]) -> list[str]:
        out = []
        for img in images:
            bits = 0
            for i, mask in enumerate(self._masks):
                if np.array_equal(np.asarray(img)[mask], self._originals[i]):
                    bits |= 1 << i
            sat = eval_bits(self._formula, bits, self._region_count)
            out.append(self._target if sat else self._other)
        return out


def random_formula(rng: random.Random, region_count: int, max_depth: int = 3) -> LogicExpr:
    """Random AND/OR formula over regions 1..region_count (for synthetic models)."""
    if region_count < 1:
        raise ValueError("need at least one region")
    pool = list(range(1, region_count + 1))

    def build(depth: int) -> LogicExpr:
        if depth == 0 or rng.random() < 0.35:
            return Literal(rng.choice(pool))
        op = conjunction if rng.random() < 0.5 else disjunction
        width = rng.randint(2, 3)
        return op(build(depth - 1) for _ in range(width))

    return build(max_depth)


class PredictionCache:
    """Map from (image id, state bits) to label, shared across runs.

    Safe for concurrent lookups/insertions; races on identical keys are
    benign for deterministic predictors (last writer wins with the same
    value). Entries never disagree with fresh queries for such predictors.
    """

    def __init__(self):
        self._entries: dict[tuple[str, int], str] = {}
        self._hits = 0
        self._misses = 0
        self._lock = threading.Lock()

    def get(self, image_id: str, bits: int) -> str | None:
        with self._lock:
            label = self._entries.get((image_id, bits))
            if label is None:
                self._misses += 1
            else:
                self._hits += 1
            return label

    def peek(self, image_id: str, bits: int) -> str | None:
        """Lookup without touching the hit/miss counters (budget pre-checks)."""
        with self._lock:
            return self._entries.get((image_id, bits))

    def put(self, image_id: str, bits: int, label: str) -> None:
        with self._lock:
            self._entries[(image_id, bits)] = label

    @property
    def hits(self) -> int:
        return self._hits

    @property
    def misses(self) -> int:
        return self._misses

    def __len__(self) -> int:
        return len(self._entries)


_PIXEL_CHUNK = 64  # bounds composed-image memory per model call


class StateLabeler:
    """Resolves state bitmasks to labels for one (image, partition, model) run.

    Composition and querying are memoized per run, so every state is sent to
    the model at most once and the first observed label is frozen (this is
    what makes nondeterministic remote models usable). ``query_count`` counts
    actual model invocations; cache hits are free.
    """

    def __init__(
        self,
        model,
        partition: RegionPartition,
        image: np.ndarray | None = None,
        fill: FillPolicy | None = None,
        cache: PredictionCache | None = None,
        image_id: str | None = None,
    ):
        self._model = model
        self._partition = partition
        self._state_channel = callable(getattr(model, "predict_state", None))
        self._image = None
        self._fill = fill or FillPolicy.gray()
        if not self._state_channel:
            if image is None:
                raise ValueError("pixel predictors require the source image")
            self._image = np.ascontiguousarray(image)
            if self._image.shape[:2] != partition.labels.shape:
                raise DimensionMismatchError("image and partition sizes differ")
        else:
            model_regions = getattr(model, "region_count", None)
            if model_regions is not None and model_regions != partition.region_count:
                raise DimensionMismatchError(
                    f"model covers {model_regions} regions, partition has {partition.region_count}"
                )
        if cache is not None and image_id is None:
            if self._image is None:
                raise ValueError("caching a state-channel run requires an explicit image_id")
            digest = hashlib.sha1(self._image.tobytes()).hexdigest()[:16]
            image_id = f"{digest}-{self._fill.spec_string()}"
        self._cache = cache
        self._image_id = image_id or "anonymous"
        self._memo: dict[int, str] = {}
        self._queries = 0

    @property
    def query_count(self) -> int:
        return self._queries

    def pending_count(self, states: Sequence[int]) -> int:
        """How many of ``states`` would hit the model right now."""
        pending = set()
        for bits in states:
            if bits in self._memo or bits in pending:
                continue
            if self._cache is not None and self._cache.peek(self._image_id, bits) is not None:
                continue
            pending.add(bits)
        return len(pending)

    def _query(self, misses: list[int]) -> list[str]:
        m = self._partition.region_count
        if self._state_channel:
            return [self._model.predict_state(StateVector(b, m)) for b in misses]
        labels: list[str] = []
        for start in range(0, len(misses), _PIXEL_CHUNK):
            chunk = misses[start : start + _PIXEL_CHUNK]
            images = [
                compose(self._image, self._partition, StateVector(b, m), self._fill)
                for b in chunk
            ]
            labels.extend(predict_batch(self._model, images))
        return labels

    def labels_for(self, states: Sequence[int]) -> list[str]:
        misses: list[int] = []
        seen_miss = set()
        for bits in states:
            if bits in self._memo or bits in seen_miss:
                continue
            if self._cache is not None:
                hit = self._cache.get(self._image_id, bits)
                if hit is not None:
                    self._memo[bits] = hit
                    continue
            misses.append(bits)
            seen_miss.add(bits)
        if misses:
            fresh = self._query(misses)
            self._queries += len(misses)
            for bits, label in zip(misses, fresh):
                self._memo[bits] = label
                if self._cache is not None:
                    self._cache.put(self._image_id, bits, label)
        return [self._memo[bits] for bits in states]


def _encode_request(req_id: str, image: np.ndarray) -> str:
    payload = {
        "id": req_id,
        "image_png_b64": base64.b64encode(image_to_png(image)).decode("ascii"),
    }
    return json.dumps(payload)


def _parse_response(line: str, pending: dict[str, int]):
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedResponseError(f"unparseable response line: {exc}") from exc
    if not isinstance(msg, dict) or not isinstance(msg.get("id"), str):
        raise MalformedResponseError(f"response without string id: {line[:200]}")
    req_id = msg["id"]
    if req_id not in pending:
        raise MalformedResponseError(f"response for unknown request id {req_id!r}")
    index = pending[req_id]
    if "error" in msg:
        raise RemoteModelError(f"model error for request {req_id}: {msg['error']}", index=index)
    label = msg.get("label")
    if not isinstance(label, str) or not label:
        raise MalformedResponseError(f"response without label: {line[:200]}", index=index)
    return req_id, index, label


_EOF = object()


class ExecPredictor(ImagePredictor):
    """Client for a child process speaking newline-delimited JSON on stdio.

    Requests are pipelined up to ``max_inflight``; responses may arrive out
    of order and are matched by id. One batch is in flight at a time (the
    instance serializes concurrent callers). A failed batch leaves the
    stream mid-conversation, so callers abort the run and open a fresh
    predictor rather than retrying on the same instance.
    """

    def __init__(self, command: str | Sequence[str], *, timeout: float = 60.0, max_inflight: int = 32):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise ValueError("empty exec command")
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"cannot start predictor process {argv[0]!r}: {exc}") from exc
        self._timeout = timeout
        self._max_inflight = max(1, max_inflight)
        self._lines: queue.Queue = queue.Queue()
        self._lock = threading.Lock()
        self._next_id = 0
        self._closed = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self):
        try:
            for line in self._proc.stdout:
                line = line.strip()
                if line:
                    self._lines.put(line)
        finally:
            self._lines.put(_EOF)

    def _send(self, line: str):
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError, OSError) as exc:
            raise TransportError(f"predictor process closed its input: {exc}") from exc

    def _next_line(self) -> str:
        try:
            item = self._lines.get(timeout=self._timeout)
        except queue.Empty:
            raise PredictorTimeoutError(
                f"no response from predictor process within {self._timeout}s"
            ) from None
        if item is _EOF:
            raise TransportError("predictor process closed its output")
        return item

    def predict_batch(self, images: Sequence[np.ndarray]) -> list[str]:
        if len(images) == 0:
            raise ValueError("predict_batch requires a non-empty batch")
        with self._lock:
            if self._closed:
                raise TransportError("predictor already closed")
            requests_ = []
            pending: dict[str, int] = {}
            for i, img in enumerate(images):
                req_id = f"q{self._next_id}"
                self._next_id += 1
                requests_.append(_encode_request(req_id, img))
                pending[req_id] = i
            results: list[str | None] = [None] * len(images)
            sent = 0
            received = 0
            while received < len(images):
                while sent < len(images) and sent - received < self._max_inflight:
                    self._send(requests_[sent])
                    sent += 1
                req_id, index, label = _parse_response(self._next_line(), pending)
                del pending[req_id]
                results[index] = label
                received += 1
            return results  # type: ignore[return-value]

    def close(self):
        with self._lock:
            if self._closed:
                return
            self._closed = True
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


class HttpPredictor(ImagePredictor):
    """Client POSTing protocol requests to an HTTP prediction endpoint."""

    def __init__(self, url: str, *, timeout: float = 60.0, max_inflight: int = 4):
        self._url = url
        self._timeout = timeout
        self._max_inflight = max(1, max_inflight)
        self._counter = threading.Lock()
        self._next_id = 0

    def _fresh_id(self) -> str:
        with self._counter:
            self._next_id += 1
            return f"q{self._next_id}"

    def _post(self, image: np.ndarray, index: int | None = None) -> str:
        req_id = self._fresh_id()
        body = {
            "id": req_id,
            "image_png_b64": base64.b64encode(image_to_png(image)).decode("ascii"),
        }
        try:
            resp = requests.post(self._url, json=body, timeout=self._timeout)
        except requests.Timeout as exc:
            raise PredictorTimeoutError(f"no response from {self._url} within {self._timeout}s", index=index) from exc
        except requests.RequestException as exc:
            raise TransportError(f"cannot reach {self._url}: {exc}", index=index) from exc
        if resp.status_code != 200:
            raise TransportError(f"{self._url} answered HTTP {resp.status_code}", index=index)
        _, _, label = _parse_response(resp.text, {req_id: index if index is not None else 0})
        return label

    def predict(self, image: np.ndarray) -> str:
        return self._post(image)

    def predict_batch(self, images: Sequence[np.ndarray]) -> list[str]:
        if len(images) == 0:
            raise ValueError("predict_batch requires a non-empty batch")
        workers = min(self._max_inflight, len(images))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(self._post, img, i) for i, img in enumerate(images)]
            return [f.result() for f in futures]


def open_predictor(spec: str, *, timeout: float = 60.0, max_inflight: int = 32):
    """Build a remote predictor from ``exec:<command>`` or ``http:<url>``."""
    if spec.startswith("exec:"):
        return ExecPredictor(spec[5:], timeout=timeout, max_inflight=max_inflight)
    if spec.startswith(("http://", "https://")):
        return HttpPredictor(spec, timeout=timeout, max_inflight=max_inflight)
    if spec.startswith("http:"):
        return HttpPredictor(spec[5:], timeout=timeout, max_inflight=max_inflight)
    raise ValueError(f"model spec must start with exec: or http:, got {spec!r}")
