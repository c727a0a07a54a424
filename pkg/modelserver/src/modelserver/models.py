"""Predictors the server can host.

Each model is a callable taking a uint8 RGB array and returning a label
string. The formula and constant models need no ML runtime at all; the
torchvision classifier imports torch lazily so the base install stays light.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image


class ConstantModel:
    """Answers the same label for every image (protocol smoke tests)."""

    def __init__(self, label: str):
        if not label:
            raise ValueError("label must be non-empty")
        self.label = label

    def __call__(self, image: np.ndarray) -> str:
        return self.label


class FormulaModel:
    """Boolean formula over regions of a label-map sidecar.

    A region counts as preserved when its pixels match the reference image
    exactly; the formula over the preserved set picks the label. The spec
    file holds::

        {"formula": <expression json>, "target_label": ..., "other_label": ...,
         "labels": <label map png>, "image": <reference png>}

    with expression nodes {"op": "and"|"or"|"lit"|"true", ...}. The label map
    must already use contiguous region values 1..M. Sidecar paths are
    resolved relative to the spec file.
    """

    def __init__(self, spec_path: str | Path):
        spec_path = Path(spec_path)
        spec = json.loads(spec_path.read_text())
        for key in ("formula", "target_label", "other_label", "labels", "image"):
            if key not in spec:
                raise ValueError(f"formula spec is missing {key!r}")
        base = spec_path.parent
        labels = np.asarray(Image.open(base / spec["labels"])).astype(np.int32)
        if labels.ndim != 2:
            raise ValueError("label map must be single-channel")
        reference = Image.open(base / spec["image"]).convert("RGB")
        self._reference = np.asarray(reference, dtype=np.uint8)
        if self._reference.shape[:2] != labels.shape:
            raise ValueError("reference image and label map sizes differ")
        self._formula = spec["formula"]
        self._target = spec["target_label"]
        self._other = spec["other_label"]
        if not self._target or not self._other:
            raise ValueError("labels must be non-empty strings")
        region_count = int(labels.max())
        self._masks = [labels == i for i in range(1, region_count + 1)]
        self._originals = [self._reference[m] for m in self._masks]

    def _evaluate(self, node, preserved) -> bool:
        op = node["op"]
        if op == "lit":
            return node["region"] in preserved
        if op == "and":
            return all(self._evaluate(c, preserved) for c in node["children"])
        if op == "or":
            return any(self._evaluate(c, preserved) for c in node["children"])
        if op == "true":
            return True
        raise ValueError(f"unknown expression op {op!r}")

    def __call__(self, image: np.ndarray) -> str:
        if image.shape != self._reference.shape:
            raise ValueError(
                f"image shape {image.shape} != reference {self._reference.shape}"
            )
        preserved = {
            i + 1
            for i in range(len(self._masks))
            if np.array_equal(image[self._masks[i]], self._originals[i])
        }
        return self._target if self._evaluate(self._formula, preserved) else self._other


class TorchvisionClassifier:
    """Argmax classifier over a torchvision backbone.

    The server owns preprocessing (resize, center crop, ImageNet
    normalization); clients send full-resolution composed PNGs. Inference is
    deterministic: eval mode, no grad, and a fixed init seed when no weights
    file is given.
    """

    def __init__(self, arch: str, vocab: list[str], weights_path: str | None = None):
        if not vocab:
            raise ValueError("vocabulary must be non-empty")
        try:
            import torch
            import torchvision
        except ImportError as exc:
            raise RuntimeError(
                "classifier mode needs torch and torchvision installed"
            ) from exc
        self._torch = torch
        self.vocab = vocab
        torch.manual_seed(0)
        self._net = torchvision.models.get_model(arch, weights=None, num_classes=len(vocab))
        if weights_path:
            state = torch.load(weights_path, map_location="cpu")
            self._net.load_state_dict(state)
        self._net.eval()
        from torchvision import transforms

        self._preprocess = transforms.Compose(
            [
                transforms.ToTensor(),
                transforms.Resize(256, antialias=True),
                transforms.CenterCrop(224),
                transforms.Normalize(
                    mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]
                ),
            ]
        )

    def __call__(self, image: np.ndarray) -> str:
        with self._torch.no_grad():
            batch = self._preprocess(image).unsqueeze(0)
            logits = self._net(batch)
            return self.vocab[int(logits.argmax(dim=1).item())]


def load_vocab(path: str | Path) -> list[str]:
    """Class names, one per line; blank lines ignored."""
    lines = [line.strip() for line in Path(path).read_text().splitlines()]
    vocab = [line for line in lines if line]
    if not vocab:
        raise ValueError(f"vocabulary file {path} is empty")
    return vocab
