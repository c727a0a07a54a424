"""Fixture builders: painted multi-region images with formula-model specs."""

import json
import random

import numpy as np
import pytest
from PIL import Image

from regionlogic import expr_to_json, partition_from_labels, random_formula


def grid_partition(rows, cols, cell=3):
    tiles = np.arange(1, rows * cols + 1, dtype=np.int32).reshape(rows, cols)
    return partition_from_labels(np.kron(tiles, np.ones((cell, cell), dtype=np.int32)))


def paint(partition, rng):
    """Solid distinct region colors, never the default gray fill."""
    img = np.zeros((*partition.labels.shape, 3), dtype=np.uint8)
    used = set()
    for i in range(1, partition.region_count + 1):
        while True:
            color = tuple(int(v) for v in rng.integers(0, 256, size=3))
            if color != (128, 128, 128) and color not in used:
                used.add(color)
                break
        img[partition.labels == i] = color
    return img


def write_fixture(tmp_path, name, formula, partition, image):
    """Materialize image + label map + formula spec; returns the spec path."""
    img_path = tmp_path / f"{name}.png"
    labels_path = tmp_path / f"{name}_labels.png"
    Image.fromarray(image, mode="RGB").save(img_path, format="PNG")
    Image.fromarray(partition.labels.astype(np.uint16)).save(labels_path, format="PNG")
    spec = {
        "formula": expr_to_json(formula),
        "target_label": "target",
        "other_label": "other",
        "labels": labels_path.name,
        "image": img_path.name,
    }
    spec_path = tmp_path / f"{name}_spec.json"
    spec_path.write_text(json.dumps(spec))
    return spec_path


@pytest.fixture
def formula_fixture(tmp_path):
    rng_np = np.random.default_rng(4)
    rng = random.Random(4)
    partition = grid_partition(2, 2)
    image = paint(partition, rng_np)
    formula = random_formula(rng, partition.region_count)
    spec_path = write_fixture(tmp_path, "fx", formula, partition, image)
    return spec_path, formula, partition, image
