"""Kronecker-product and partial-trace identities as (name, check) pairs.

Each check draws its own operands from ``rng`` for a bipartition ``(l, m)``
and returns ``(lhs, rhs)``.
"""

import numpy as np

from perceptronium.hilbert import hs_inner, ptrace


def _c(rng, r, c=None):
    c = r if c is None else c
    return (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))) / np.sqrt(2)


def _invertible(rng, k):
    while True:
        a = _c(rng, k)
        if np.linalg.cond(a) < 50:
            return a


def _tr1(a, l, m):
    return ptrace(a, (l, m), "first")


def _tr2(a, l, m):
    return ptrace(a, (l, m), "second")


def _assoc(rng, l, m):
    a, b, c = _c(rng, l), _c(rng, m, 2), _c(rng, 2, 3)
    return np.kron(np.kron(a, b), c), np.kron(a, np.kron(b, c))


def _dist_left(rng, l, m):
    a, b, c = _c(rng, l), _c(rng, m), _c(rng, m)
    return np.kron(a, b + c), np.kron(a, b) + np.kron(a, c)


def _dist_right(rng, l, m):
    a, b, c = _c(rng, m), _c(rng, l), _c(rng, l)
    return np.kron(b + c, a), np.kron(b, a) + np.kron(c, a)


def _dagger(rng, l, m):
    a, b = _c(rng, l, 3), _c(rng, m, 2)
    return np.kron(a, b).conj().T, np.kron(a.conj().T, b.conj().T)


def _inverse(rng, l, m):
    a, b = _invertible(rng, l), _invertible(rng, m)
    return np.linalg.inv(np.kron(a, b)), np.kron(np.linalg.inv(a), np.linalg.inv(b))


def _trace(rng, l, m):
    a, b = _c(rng, l), _c(rng, m)
    return np.trace(np.kron(a, b)), np.trace(a) * np.trace(b)


def _tr1_prod(rng, l, m):
    a, b = _c(rng, l), _c(rng, m)
    return _tr1(np.kron(a, b), l, m), np.trace(a) * b


def _tr2_prod(rng, l, m):
    a, b = _c(rng, l), _c(rng, m)
    return _tr2(np.kron(a, b), l, m), np.trace(b) * a


def _cyc1(rng, l, m):
    a, b = _c(rng, l * m), np.kron(_c(rng, l), np.eye(m))
    return _tr1(a @ b, l, m), _tr1(b @ a, l, m)


def _cyc2(rng, l, m):
    a, b = _c(rng, l * m), np.kron(np.eye(l), _c(rng, m))
    return _tr2(a @ b, l, m), _tr2(b @ a, l, m)


def _pull_left1(rng, l, m):
    a, b = _c(rng, m), _c(rng, l * m)
    return _tr1(np.kron(np.eye(l), a) @ b, l, m), a @ _tr1(b, l, m)


def _pull_left2(rng, l, m):
    a, b = _c(rng, l), _c(rng, l * m)
    return _tr2(np.kron(a, np.eye(m)) @ b, l, m), a @ _tr2(b, l, m)


def _pull_right1(rng, l, m):
    a, b = _c(rng, l * m), _c(rng, m)
    return _tr1(a @ np.kron(np.eye(l), b), l, m), _tr1(a, l, m) @ b


def _pull_right2(rng, l, m):
    a, b = _c(rng, l * m), _c(rng, l)
    return _tr2(a @ np.kron(b, np.eye(m)), l, m), _tr2(a, l, m) @ b


def _split_right1(rng, l, m):
    a, b, c = _c(rng, l * m), _c(rng, l), _c(rng, m)
    return _tr1(a @ np.kron(b, c), l, m), _tr1(a @ np.kron(b, np.eye(m)), l, m) @ c


def _split_right2(rng, l, m):
    a, b, c = _c(rng, l * m), _c(rng, l), _c(rng, m)
    return _tr2(a @ np.kron(b, c), l, m), _tr2(a @ np.kron(np.eye(l), c), l, m) @ b


def _split_left1(rng, l, m):
    a, b, c = _c(rng, l * m), _c(rng, l), _c(rng, m)
    return _tr1(np.kron(b, c) @ a, l, m), c @ _tr1(np.kron(b, np.eye(m)) @ a, l, m)


def _split_left2(rng, l, m):
    a, b, c = _c(rng, l * m), _c(rng, l), _c(rng, m)
    return _tr2(np.kron(b, c) @ a, l, m), b @ _tr2(np.kron(np.eye(l), c) @ a, l, m)


def _adjoint2(rng, l, m):
    a, b = _c(rng, l * m), _c(rng, l * m)
    ta = _tr2(a, l, m)
    return np.trace(np.kron(ta, np.eye(m)) @ b), np.trace(ta @ _tr2(b, l, m))


def _adjoint1(rng, l, m):
    a, b = _c(rng, l * m), _c(rng, l * m)
    ta = _tr1(a, l, m)
    return np.trace(np.kron(np.eye(l), ta) @ b), np.trace(ta @ _tr1(b, l, m))


def _hs_product(rng, l, m):
    a, b, c, d = _c(rng, l), _c(rng, m), _c(rng, l), _c(rng, m)
    return hs_inner(np.kron(a, b), np.kron(c, d)), hs_inner(a, c) * hs_inner(b, d)


def _norm_product(rng, l, m):
    a, b = _c(rng, l), _c(rng, m)
    return np.linalg.norm(np.kron(a, b)), np.linalg.norm(a) * np.linalg.norm(b)


IDENTITIES = [
    ("kron_associative", _assoc),
    ("kron_distributes_left", _dist_left),
    ("kron_distributes_right", _dist_right),
    ("kron_dagger", _dagger),
    ("kron_inverse", _inverse),
    ("trace_of_kron", _trace),
    ("tr1_of_kron", _tr1_prod),
    ("tr2_of_kron", _tr2_prod),
    ("tr1_cyclic_first_factor", _cyc1),
    ("tr2_cyclic_second_factor", _cyc2),
    ("tr1_pull_out_left", _pull_left1),
    ("tr2_pull_out_left", _pull_left2),
    ("tr1_pull_out_right", _pull_right1),
    ("tr2_pull_out_right", _pull_right2),
    ("tr1_split_right_product", _split_right1),
    ("tr2_split_right_product", _split_right2),
    ("tr1_split_left_product", _split_left1),
    ("tr2_split_left_product", _split_left2),
    ("tr2_adjointness", _adjoint2),
    ("tr1_adjointness", _adjoint1),
    ("hs_inner_of_krons", _hs_product),
    ("hs_norm_of_kron", _norm_product),
]

SHAPES = [(2, 2), (2, 3), (3, 4)]


def worst_error(check, trials, seed=0, shapes=SHAPES):
    """Largest ``|lhs - rhs| / max(1, |lhs|)`` over ``trials`` draws per shape."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for l, m in shapes:
        for _ in range(trials):
            lhs, rhs = check(rng, l, m)
            lhs, rhs = np.asarray(lhs), np.asarray(rhs)
            scale = max(1.0, float(np.max(np.abs(lhs))))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    return worst
