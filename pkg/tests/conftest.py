import pytest

from streamclust import Chunk, Record

# 8-record, 2-attribute toy dataset with two classes; values already in [0,1].
TOY_ROWS = (
    ((0.052, 0.153), 1),
    ((0.061, 0.252), 1),
    ((0.046, 0.175), 1),
    ((0.055, 0.183), 1),
    ((0.957, 0.858), 2),
    ((0.965, 0.752), 2),
    ((0.957, 0.858), 2),
    ((0.965, 0.752), 2),
)

# 6-record, 4-attribute chunk used to pin down artificial-class binning,
# together with the expected bin grid for 3 classes.
BINNING_ROWS = (
    (0.052, 0.153, 0.772, 0.953),
    (0.061, 0.252, 0.761, 0.952),
    (0.957, 0.858, 0.257, 0.258),
    (0.965, 0.752, 0.265, 0.252),
    (0.543, 0.533, 0.012, 0.092),
    (0.496, 0.488, 0.022, 0.097),
)
BINNING_LABELS = (1, 1, 2, 2, 3, 3)
EXPECTED_BINS = (
    (1, 1, 3, 3),
    (1, 1, 3, 3),
    (3, 3, 2, 2),
    (3, 3, 2, 2),
    (2, 2, 1, 1),
    (2, 2, 1, 1),
)


@pytest.fixture
def toy_records():
    return [Record(values, label) for values, label in TOY_ROWS]


@pytest.fixture
def toy_chunk(toy_records):
    return Chunk(1, tuple(toy_records))


def labels_k(chunk: Chunk) -> int:
    return len({r.label for r in chunk.records})
