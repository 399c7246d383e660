"""Seed matrices used by the cost model, the CLI and the test suite.

All of them are 4x4 and MDS.  The cost fixtures were picked so that each
generation-cost class gets one representative:

* ``COST_CIRCULANT`` is the lexicographically first MDS circulant whose
  first row has the shape ``[a, b, c, 1]`` with a, b, c distinct.
* ``COST_NON_CIRCULANT`` holds the same rows in a different order, so its
  entry multiset (and therefore its cost) matches the circulant.
* ``NON_OPTIMAL`` and ``WORST_CASE`` came out of a seeded random search
  (numpy ``default_rng(2024)``) over small entry values.
"""

from __future__ import annotations

from .gfield import DEFAULT_FIELD, FieldSpec
from .matrix import Matrix, circulant
from .mds import MatrixClass, find_optimal_instance

TWOFISH_FIELD = FieldSpec(8, 0x169)

AES_CIRCULANT = circulant(DEFAULT_FIELD, [0x02, 0x03, 0x01, 0x01])

# row-permuted AES circulant: non-circulant, same field, still MDS
AES_PERMUTED = Matrix.from_rows(
    [AES_CIRCULANT.row(0), AES_CIRCULANT.row(3), AES_CIRCULANT.row(2), AES_CIRCULANT.row(1)]
)

TWOFISH_MDS = Matrix.from_rows(
    [
        [0x01, 0xEF, 0x5B, 0x5B],
        [0x5B, 0xEF, 0xEF, 0x01],
        [0xEF, 0x5B, 0x01, 0xEF],
        [0xEF, 0x01, 0xEF, 0x5B],
    ],
    TWOFISH_FIELD,
)

COST_CIRCULANT = circulant(DEFAULT_FIELD, [0x02, 0x03, 0x04, 0x01])

COST_NON_CIRCULANT = Matrix.from_rows(
    [COST_CIRCULANT.row(0), COST_CIRCULANT.row(3), COST_CIRCULANT.row(2), COST_CIRCULANT.row(1)]
)

NON_OPTIMAL = Matrix.from_rows(
    [
        [0x03, 0x03, 0x06, 0x02],
        [0x02, 0x09, 0x08, 0x05],
        [0x09, 0x04, 0x01, 0x08],
        [0x01, 0x04, 0x05, 0x07],
    ]
)

WORST_CASE = Matrix.from_rows(
    [
        [0x0B, 0x11, 0x05, 0x0C],
        [0x10, 0x02, 0x03, 0x09],
        [0x08, 0x04, 0x0E, 0x0A],
        [0x0D, 0x0F, 0x07, 0x06],
    ]
)


def optimal_instance() -> Matrix:
    return find_optimal_instance(DEFAULT_FIELD)[2]


def theorem_seeds() -> dict[str, Matrix]:
    return {
        "aes-circulant": AES_CIRCULANT,
        "optimal": optimal_instance(),
        "twofish": TWOFISH_MDS,
    }


def canonical_fixtures() -> dict[MatrixClass, Matrix]:
    """One fixture per class, in the order of the generation-cost table."""
    return {
        MatrixClass.OPTIMAL: optimal_instance(),
        MatrixClass.CIRCULANT: COST_CIRCULANT,
        MatrixClass.NON_CIRCULANT: COST_NON_CIRCULANT,
        MatrixClass.NON_OPTIMAL: NON_OPTIMAL,
        MatrixClass.WORST_CASE: WORST_CASE,
    }
