"""Deterministic seed derivation for parallel and replicated runs.

One master seed fans out to per-chain / per-trial streams via string seeds
of the form ``"<master>/<label>"``.  CPython feeds string seeds through
SHA-512 (``random.seed(a, version=2)``), so the derivation is stable across
platforms, Python builds, and hash randomization — serial and parallel
schedules see identical per-chain randomness.
"""

from __future__ import annotations

import random


def derive_seed(master, label) -> str:
    """The derived seed itself (a string usable anywhere a seed is taken)."""
    return f"{master}/{label}"


def child_rng(master, label) -> random.Random:
    """A fresh RNG stream for the given (master seed, label) pair."""
    return random.Random(derive_seed(master, label))
