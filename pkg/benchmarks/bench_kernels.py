"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5]

Both implementations are imported directly, so the
COHERENCE_AUDIT_DISABLE_NUMBA flag does not affect this script.
"""
import argparse
import itertools
import timeit

import numpy as np

from coherence_audit import kernels
from coherence_audit.channels import sample_density_matrix


def _spectrum(d, seed):
    w, v = np.linalg.eigh(sample_density_matrix(d, d, seed).matrix)
    return w, np.ascontiguousarray(v)


def cases():
    w, v = _spectrum(64, 0)
    h = np.diag(np.arange(64.0))
    a2 = np.abs(v.conj().T @ h @ v) ** 2
    yield ("qfi_pair_sum d=64",
           lambda: kernels.qfi_pair_sum_nb(w, a2, 1e-12),
           lambda: kernels.qfi_pair_sum_np(w, a2, 1e-12))

    m = np.ascontiguousarray(sample_density_matrix(256, 256, 1).matrix)
    yield ("offdiag_abs_sum d=256",
           lambda: kernels.offdiag_abs_sum_nb(m),
           lambda: kernels.offdiag_abs_sum_np(m))

    for d in (7, 8):
        w, v = _spectrum(d, d)
        e = np.arange(d, dtype=float)
        perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
        yield (f"permuted_qfi_batch d={d} ({len(perms)} perms)",
               lambda w=w, v=v, e=e, p=perms: kernels.permuted_qfi_batch_nb(w, v, e, p, 1e-12),
               lambda w=w, v=v, e=e, p=perms: kernels.permuted_qfi_batch_np(w, v, e, p, 1e-12))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':40} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8}")
    for name, fast, slow in cases():
        a, b = fast(), slow()  # compile / warm up, and check agreement
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12), name
        t_nb = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40} {t_nb:11.3f} {t_np:11.3f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
