"""Counter-based random streams.

Every random word used by the generator is a pure function of
``(master seed, clause index, attempt, slot)``, so clause ``j`` can be
produced by any worker in any order and still come out bit-identical.

The mixer is the SplitMix64 finalizer.  For a formula with clause width
``k`` the words are::

    root       = mix(seed)
    key(j)     = mix(root + GAMMA * (j + 1))
    word(j,a,s)= mix(key(j) + GAMMA * (a * (k + 1) + s + 1))

Slots ``s = 0 .. k-1`` feed the variable draws of attempt ``a``; slot
``s = k`` carries the sign bits (bit ``s`` negates draw ``s``).  A draw
turns a word into ``u = (word >> 11) * 2**-53`` and looks it up in an
alias table.  Both kernel backends implement exactly this recipe; the
vectorised helpers here are the reference.
"""
from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= _MIX1
        z ^= z >> np.uint64(27)
        z *= _MIX2
        z ^= z >> np.uint64(31)
    return z


def clause_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Per-clause stream keys for clause indices ``start .. start+count-1``."""
    root = np.uint64(mix64(seed))
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(root + _GAMMA * j)


def stream_words(keys: np.ndarray, attempt: np.ndarray | int, slot: int, k: int) -> np.ndarray:
    ctr = np.asarray(attempt, dtype=np.uint64) * np.uint64(k + 1) + np.uint64(slot + 1)
    with np.errstate(over="ignore"):
        return mix64_array(keys + _GAMMA * ctr)


def unit_interval(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def derive_seed(master: int, *coords: int) -> int:
    """Hash a master seed and integer coordinates into an independent 64-bit seed.

    Uses BLAKE2b over the decimal rendering ``"master:c1:c2:..."`` so that
    the mapping is stable across platforms and Python versions.
    """
    text = ":".join(str(int(c)) for c in (master, *coords))
    digest = hashlib.blake2b(text.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
