from __future__ import annotations

from pathlib import Path

import pytest
import torch

torch.set_num_threads(4)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def train_tsv() -> Path:
    return DATA / "train.tsv"


@pytest.fixture(scope="session")
def test_tsv() -> Path:
    return DATA / "test.tsv"


@pytest.fixture(scope="session")
def overfit_tsv() -> Path:
    return DATA / "overfit.tsv"
