"""Acceptance: the stdio formula server, driven by the engine's subprocess
client, must reproduce the in-process synthetic model's final states exactly.
"""

import random
import sys
from contextlib import contextmanager

import numpy as np

from regionlogic import ExecPredictor, FillPolicy, SyntheticLogicModel, random_formula, refine

from conftest import grid_partition, paint, write_fixture


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL", flush=True)
        raise
    print(f"[ACCEPTANCE] {name}: PASS", flush=True)


def test_protocol_conformance_on_20_fixtures(tmp_path):
    with criterion("protocol-conformance"):
        rng = random.Random(2024)
        rng_np = np.random.default_rng(2024)
        shapes = [(2, 2), (2, 3), (3, 2)]
        for case in range(20):
            rows, cols = shapes[case % len(shapes)]
            partition = grid_partition(rows, cols)
            image = paint(partition, rng_np)
            formula = random_formula(rng, partition.region_count)
            spec_path = write_fixture(tmp_path, f"case{case}", formula, partition, image)

            in_process = refine(
                None, partition, SyntheticLogicModel(formula, partition.region_count)
            )
            command = [
                sys.executable, "-m", "modelserver",
                "--mode", "stdio", "--formula", str(spec_path),
            ]
            with ExecPredictor(command, timeout=60) as remote:
                over_stdio = refine(image, partition, remote, FillPolicy.gray())

            assert over_stdio.states == in_process.states, f"fixture {case}"
            assert over_stdio.reference_label == in_process.reference_label
