"""
Copyright (c) 2024, anisoqed developers
License: GPLv3 (see LICENSE)
--------------------------------------------------------------

Description:
    Numerical facade of the anisoqed package.

    Linear algebra goes through this module (``import anisoqed.num as
    anp``): ``anp.eigh``, ``anp.solve``, ``anp.norm`` and so on, so that
    the factorizations used by the physics are declared in one place.
    Array construction and elementwise math use numpy directly.

    The environment variable "ANISO_THREADS" caps the number of worker
    threads used by the angular sweeps. When it is not set, at most 4
    threads are used. Set ANISO_THREADS=1 to run sequentially.

"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy
from numpy.linalg import (
    LinAlgError,
    cond,
    det,
    eigh,
    eigvalsh,
    inv,
    norm,
    qr,
    solve,
)
from scipy.linalg import lu_factor, lu_solve

from anisoqed.errors import ConfigurationError


def _read_threads():
    value = os.environ.get("ANISO_THREADS")
    if value is None or value.strip() == "":
        return None
    try:
        n = int(value)
    except ValueError:
        raise ConfigurationError(f"ANISO_THREADS must be a positive integer, got {value!r}")
    if n < 1:
        raise ConfigurationError(f"ANISO_THREADS must be a positive integer, got {value!r}")
    return n


def max_workers():
    """Number of worker threads allowed by ANISO_THREADS."""
    n = _read_threads()
    if n is None:
        n = numpy.minimum(4, os.cpu_count() or 1)
    return int(n)


if os.environ.get("ANISO_VERBOSE") == "1":
    print(f"anisoqed workers: {max_workers()}")


def parallel_map(func, items, workers=None):
    """Map `func` over `items`, returning results in input order.

    Parameters
    ----------
    func : callable
        Function of a single argument.
    items : iterable
        Arguments.
    workers : int, optional
        Number of threads. Defaults to ``max_workers()``.

    Returns
    -------
    list
        ``[func(x) for x in items]``, evaluated concurrently when more
        than one worker is allowed.
    """
    items = list(items)
    if workers is None:
        workers = max_workers()
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def is_finite(x):
    return bool(numpy.all(numpy.isfinite(x)))


def sym(A):
    """Symmetric part of a square matrix."""
    return 0.5 * (A + A.T)


def _make_levi_civita():
    e = numpy.zeros((3, 3, 3))
    e[0, 1, 2] = e[1, 2, 0] = e[2, 0, 1] = 1.0
    e[0, 2, 1] = e[2, 1, 0] = e[1, 0, 2] = -1.0
    e.flags.writeable = False
    return e


levi_civita = _make_levi_civita()


def cross_matrix(q):
    """Matrix [q]x with ([q]x v) = q x v; q may be stacked, shape (..., 3)."""
    return numpy.einsum("iab,...a->...ib", levi_civita, q)


def relerr(a, b):
    """Relative error of `a` with respect to `b` in the max norm."""
    a = numpy.asarray(a)
    b = numpy.asarray(b)
    scale = numpy.max(numpy.abs(b))
    if scale == 0.0:
        return float(numpy.max(numpy.abs(a - b)))
    return float(numpy.max(numpy.abs(a - b)) / scale)
