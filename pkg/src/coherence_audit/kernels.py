"""Inner loops shared by the measures and the permutation search.

Each kernel exists twice: a loop version compiled by numba (``*_nb``) and a
vectorised numpy version (``*_np``). The public names dispatch on
``_accel.USE_NUMBA``. Both versions are always importable so they can be
checked against each other.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


@njit
def qfi_pair_sum_nb(evals, overlap_abs2, floor):
    d = evals.shape[0]
    total = 0.0
    for i in range(d):
        for j in range(d):
            s = evals[i] + evals[j]
            if s <= floor:
                continue
            diff = evals[i] - evals[j]
            num = diff * diff
            if num == 0.0:
                continue
            total += num / s * overlap_abs2[i, j]
    return 2.0 * total


def qfi_pair_sum_np(evals, overlap_abs2, floor):
    s = evals[:, None] + evals[None, :]
    num = (evals[:, None] - evals[None, :]) ** 2
    keep = (s > floor) & (num != 0.0)
    # masked pairs are removed before dividing, so no 0/0 is evaluated
    return 2.0 * float(np.sum(num[keep] / s[keep] * overlap_abs2[keep]))


@njit
def offdiag_abs_sum_nb(mat):
    d = mat.shape[0]
    total = 0.0
    for i in range(d):
        for j in range(d):
            if i != j:
                z = mat[i, j]
                total += np.sqrt(z.real * z.real + z.imag * z.imag)
    return total


def offdiag_abs_sum_np(mat):
    a = np.abs(mat)
    return float(a.sum() - np.trace(a))


@njit
def permuted_qfi_batch_nb(evals, vecs, energies, perms, floor):
    # QFI of P rho P^dag against diag(energies) equals the QFI of rho against
    # diag(energies[perm]), so the spectrum of rho is reused for every perm.
    d = evals.shape[0]
    n_pairs = 0
    for i in range(d):
        for j in range(i + 1, d):
            if evals[i] + evals[j] > floor and evals[i] != evals[j]:
                n_pairs += 1
    weight = np.empty(n_pairs)
    prod_re = np.empty((n_pairs, d))
    prod_im = np.empty((n_pairs, d))
    q = 0
    for i in range(d):
        for j in range(i + 1, d):
            s = evals[i] + evals[j]
            if s > floor and evals[i] != evals[j]:
                diff = evals[i] - evals[j]
                # (i, j) and (j, i) contribute equally
                weight[q] = 4.0 * diff * diff / s
                for k in range(d):
                    z = vecs[k, i].conjugate() * vecs[k, j]
                    prod_re[q, k] = z.real
                    prod_im[q, k] = z.imag
                q += 1
    n_perm = perms.shape[0]
    out = np.empty(n_perm)
    h = np.empty(d)
    for p in range(n_perm):
        for k in range(d):
            h[k] = energies[perms[p, k]]
        total = 0.0
        for q in range(n_pairs):
            re = 0.0
            im = 0.0
            for k in range(d):
                re += prod_re[q, k] * h[k]
                im += prod_im[q, k] * h[k]
            total += weight[q] * (re * re + im * im)
        out[p] = total
    return out


def permuted_qfi_batch_np(evals, vecs, energies, perms, floor, chunk=4096):
    n_perm = perms.shape[0]
    out = np.empty(n_perm)
    s = evals[:, None] + evals[None, :]
    num = (evals[:, None] - evals[None, :]) ** 2
    keep = (s > floor) & (num != 0.0)
    weight = np.where(keep, num / np.where(keep, s, 1.0), 0.0)
    for start in range(0, n_perm, chunk):
        h = energies[perms[start:start + chunk]]  # (b, d)
        m = np.einsum("ki,bk,kj->bij", vecs.conj(), h, vecs, optimize=True)
        out[start:start + chunk] = 2.0 * np.einsum(
            "ij,bij->b", weight, m.real ** 2 + m.imag ** 2)
    return out


if USE_NUMBA:
    qfi_pair_sum = qfi_pair_sum_nb
    offdiag_abs_sum = offdiag_abs_sum_nb
    permuted_qfi_batch = permuted_qfi_batch_nb
else:
    qfi_pair_sum = qfi_pair_sum_np
    offdiag_abs_sum = offdiag_abs_sum_np
    permuted_qfi_batch = permuted_qfi_batch_np
