import numpy as np
import pytest

from rtflab import _pykernels, kernels
from rtflab.batch import SeriesBatch
from rtflab.fields import residue_field
from rtflab.laurent import LocalElem

try:
    from rtflab import _ckernels
except ImportError:
    _ckernels = None


def digits(q, rows, width, seed):
    rng = np.random.default_rng(seed)
    D = rng.integers(0, q, size=(rows, width), dtype=np.int64)
    D[:, 0] = rng.integers(1, q, size=rows)
    return D


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_compiled_kernels_match_numpy(q):
    F = residue_field(q)
    A, B = digits(q, 200, 6, q), digits(q, 200, 6, q + 1)
    np.testing.assert_array_equal(_ckernels.conv(A, B, 6, F.add_t, F.mul_t), _pykernels.conv(A, B, 6, F.add_t, F.mul_t))
    Z = A.copy()
    Z[:50] = 0
    np.testing.assert_array_equal(_ckernels.first_nonzero(Z), _pykernels.first_nonzero(Z))
    np.testing.assert_array_equal(_ckernels.inv_units(A, F.add_t, F.mul_t, F.neg_t, F.inv_t),
                                  _pykernels.inv_units(A, F.add_t, F.mul_t, F.neg_t, F.inv_t))


@pytest.mark.parametrize("q", [3, 4])
def test_batch_arithmetic_matches_scalar(q):
    F = residue_field(q)
    D = digits(q, 20, 5, 11)
    batch = SeriesBatch.from_units(F, D, shift=1)
    prod = batch * batch.inv_units()
    for r in range(batch.n):
        assert prod.row(r).agrees(LocalElem.one(F))
        x = batch.row(r)
        assert (batch * batch).row(r).agrees(x * x)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("RTF_LAB_THREADS", "3")
    assert kernels.threads() == 3
    monkeypatch.delenv("RTF_LAB_THREADS")
    assert kernels.threads() is None
    assert kernels.BACKEND in ("cython", "python")
