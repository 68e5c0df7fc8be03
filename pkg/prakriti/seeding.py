"""
Seeding
=======

One generator for the whole package: numpy's ``Generator`` over the PCG64
bit generator. The raw PCG64 bit stream for a given integer seed is
identical across platforms and numpy releases; the ``Generator`` methods
built on it (``permutation``, ``choice``, ``integers``, ...) may change their
algorithms between numpy feature releases. Splits, initialisations and
synthetic tables are reproducible for a fixed numpy version; keep
``numpy.__version__`` with results that must be regenerated bit for bit.

Independent streams are obtained by re-seeding, never by sharing a
generator: ``derive_seed(master, purpose)`` hashes the master seed together
with a purpose string (SHA-256, first 8 bytes, big endian, top bit cleared)
so a sweep cell or a K-modes restart gets the same seed no matter in which
order, or in which process, it runs.
"""

import hashlib

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """PCG64-backed generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seed(master_seed: int, purpose: str) -> int:
    """
    Derive a child seed from a master seed and a purpose string.

    Parameters
    ----------
    master_seed : int
        Seed the user supplied (``--seed``)
    purpose : str
        Stable descriptor, e.g. ``"cell/test_size=0.1/n_features=20"``

    Returns
    -------
    int
        Non-negative 63-bit seed
    """
    digest = hashlib.sha256(f"{int(master_seed)}:{purpose}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFF_FFFF_FFFF_FFFF
