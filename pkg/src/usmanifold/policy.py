"""Global numeric tolerances.

All residual checks in the package read from a single :class:`NumericPolicy`
record. Use :func:`numeric_policy` to override values temporarily::

    with numeric_policy(unitary_tol=1e-7):
        ...
"""
from contextlib import contextmanager
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class NumericPolicy:
    # per-dimension residual bounds (multiplied by n)
    unitary_tol: float = 1e-9
    symmetric_tol: float = 1e-9
    # precondition slack for inputs that should be unitary/symmetric
    input_tol: float = 1e-8
    # singular values below rank_tol * s_max are treated as zero
    rank_tol: float = 1e-10
    # relative gap defining an eigenvalue cluster of Re(U)
    cluster_tol: float = 1e-8
    degenerate_retraction_tol: float = 1e-12
    cayley_tol: float = 1e-8


_POLICY = NumericPolicy()


def get_policy():
    return _POLICY


def set_policy(policy):
    global _POLICY
    _POLICY = policy


@contextmanager
def numeric_policy(**overrides):
    old = get_policy()
    set_policy(replace(old, **overrides))
    try:
        yield get_policy()
    finally:
        set_policy(old)
