"""Pure-numpy versions of the hot loops (fallback when the extension is absent)."""
import numpy as np


def mrc_terms(A, B):
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape or A.ndim != 3:
        raise ValueError("A and B must have the same (T, M, N) shape")
    gram = np.matmul(A.conj().transpose(0, 2, 1), A)
    power = np.abs(gram) ** 2
    norm = np.real(np.diagonal(gram, axis1=1, axis2=2)).copy()
    interference = power.sum(axis=2) - np.diagonal(power, axis1=1, axis2=2)
    d = np.sum(B.real ** 2 + B.imag ** 2, axis=2)
    quad = np.einsum("tm,tmn->tn", d, A.real ** 2 + A.imag ** 2)
    return norm, interference, quad


def quantize_real(x, thresholds, levels):
    thresholds = np.asarray(thresholds, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.float64)
    if levels.shape[0] != thresholds.shape[0] + 1:
        raise ValueError("need len(levels) == len(thresholds) + 1")
    x = np.asarray(x, dtype=np.float64)
    return levels[np.searchsorted(thresholds, x, side="left")]
