"""Process-wide lock for dense linear algebra.

The bundled OpenBLAS is not reliably re-entrant when several Python threads
call into it at once (heap corruption was observed under pytest), so BLAS and
LAPACK calls made from worker threads go through ``BLAS_LOCK``.  Only the
dense kernels are serialised; valuation work keeps running concurrently.
"""

import threading

BLAS_LOCK = threading.Lock()
