"""Time the numba and numpy kernels side by side.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20]

Both kernel modules are imported directly, so the ``QFOPT_BACKEND`` flag
does not matter here.  The first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from qfopt import _kernels_numba as nb
from qfopt import _kernels_numpy as npk


def cases(rng):
    out = []
    for P in (240, 3000):
        f = rng.standard_normal(P)
        X = np.column_stack([np.ones(P), f])
        y = 0.8 * f + rng.standard_normal(P)
        out.append((f"fn_solve P={P}", lambda k, X=X, y=y: k.fn_solve(X, y, 0.25, 1e-8 * P, 200,
                                                                       0.99995)))
    v = rng.standard_normal(3000)
    out.append(("hac_bartlett P=3000 s=10", lambda k: k.hac_bartlett(v, 10)))
    panel = rng.standard_normal((36, 480))
    out.append(("block_variance 36x480 l=4", lambda k: k.block_variance(panel, 4)))
    eps = rng.standard_normal(3500)
    out.append(("garch_path n=3500", lambda k: k.garch_path(eps, 0.0, 0.05, 0.1, 0.85, 1.0)))
    out.append(("ar_filter n=3500", lambda k: k.ar_filter(eps, 0.6, 0.0)))
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call in cases(rng):
        call(nb)  # compile
        t_np = min(timeit.repeat(lambda: call(npk), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: call(nb), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<28}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
