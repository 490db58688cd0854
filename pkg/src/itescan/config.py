"""Resource caps and runtime configuration.

All caps guard desk-scale feasibility (dense diagonalization, sparse vector
growth, cluster enumeration). They can be overridden from a key=value config
file; overrides are reported with a loud warning since they void the
feasibility guarantees the defaults encode.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Caps:
    """Hard limits applied by the library operations."""

    oracle_qubits: int = 14          # dense diagonalization limit
    sparse_qubits: int = 24          # sparse moment propagation limit
    sparse_entries: int = 2 ** 20    # sparse vector size during propagation
    cluster_count: int = 2_000_000   # enumerated connected clusters per size
    conjugation_terms: int = 4096    # Pauli terms after circuit conjugation
    continuation_order: int = 1_000_000  # series order for analytic continuation
    pair_count: int = 10_000         # configuration pairs in a partition estimate


DEFAULT_CAPS = Caps()

WORKERS_ENV_VAR = "ITESCAN_WORKERS"


def worker_count() -> int:
    """Default worker count, from the environment (minimum 1)."""
    raw = os.environ.get(WORKERS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        warnings.warn(f"ignoring non-integer {WORKERS_ENV_VAR}={raw!r}")
        return 1


def load_caps(path: str, base: Caps = DEFAULT_CAPS) -> Caps:
    """Read cap overrides from a ``key = value`` text file.

    Unknown keys are rejected; every applied override triggers a warning.
    """
    known = {f.name for f in fields(Caps)}
    overrides: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown cap {key!r}")
            overrides[key] = int(value.strip())
    if overrides:
        warnings.warn(
            "cap overrides in effect (feasibility guarantees void): "
            + ", ".join(f"{k}={v}" for k, v in sorted(overrides.items()))
        )
    return replace(base, **overrides)
