import itertools
import math
import random

import numpy as np

from multicalc.expr import evaluate, free_vars, to_expr
from multicalc.tensor import Tensor


def equivalent(a, b, n=20, seed=0, rel=1e-9, names=None, low=0.5, high=2.0):
    """Semantic equivalence: agreement at ``n`` random bindings."""
    ea, eb = to_expr(a), to_expr(b)
    names = sorted(set(names or ()) | free_vars(ea) | free_vars(eb))
    rng = random.Random(seed)
    for _ in range(n):
        env = {v: rng.uniform(low, high) for v in names}
        va, vb = evaluate(ea, env), evaluate(eb, env)
        if not math.isclose(va, vb, rel_tol=rel, abs_tol=rel):
            return False
    return True


def brute_einstein(tensors):
    """Sum of products over every assignment of every index."""
    ext = {}
    for t in tensors:
        ext.update(zip(t.names, t.shape))
    count = {}
    for t in tensors:
        for n in t.names:
            count[n] = count.get(n, 0) + 1
    order = list(dict.fromkeys(n for t in tensors for n in t.names))
    free = [n for n in order if count[n] == 1]
    out = np.zeros([ext[n] for n in free])
    for values in itertools.product(*(range(ext[n]) for n in order)):
        env = dict(zip(order, values))
        term = 1.0
        for t in tensors:
            term *= t.data[tuple(env[n] for n in t.names)]
        out[tuple(env[n] for n in free)] += term
    return out, free


def random_instance(rng: random.Random):
    letters = "ijkl"
    ext = {n: rng.randint(1, 4) for n in letters}
    ops = []
    for _ in range(rng.randint(1, 4)):
        names = [rng.choice(letters) for _ in range(rng.randint(1, 4))]
        shape = [ext[n] for n in names]
        data = np.array([rng.randint(-3, 3) for _ in range(int(np.prod(shape)))], dtype=float).reshape(shape)
        ops.append(Tensor(data, names))
    return ops


def brute_partition_count(n, length):
    """Distinct sorted compositions of n, enumerated by cut-point bitmask."""
    if n == 0:
        return 1
    seen = set()
    for mask in range(2 ** (n - 1)):
        parts, run = [], 1
        for bit in range(n - 1):
            if mask >> bit & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        if len(parts) <= length:
            seen.add(tuple(sorted(parts, reverse=True)))
    return len(seen)


# the four test functions of the finite-difference accuracy table, with exact derivatives
ACCURACY_CASES = {
    "x^2*exp(x)": lambda x: (2 * x + x * x) * math.exp(x),
    "x*sin(x^2)": lambda x: math.sin(x * x) + 2 * x * x * math.cos(x * x),
    "x*log(x^2)": lambda x: math.log(x * x) + 2,
    "exp(sin(x))": lambda x: math.cos(x) * math.exp(math.sin(x)),
}


def random_poly(rng, names, terms=4, degree=3):
    parts = []
    for _ in range(terms):
        c = rng.randint(-4, 4) or 1
        powers = "*".join(f"{n}^{rng.randint(0, degree)}" for n in names)
        parts.append(f"({c})*{powers}")
    return " + ".join(parts)
