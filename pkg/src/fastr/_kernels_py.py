"""Pure-NumPy contraction kernel, used when the compiled extension is absent."""

import numpy as np


def contract_axis(arr, axis, v):
    """Contract `arr` with vector `v` along `axis`, dropping that axis.

    Equivalent to the mode-n vector product; remaining axes keep their order.
    """
    out = np.tensordot(arr, v, axes=([axis], [0]))
    return np.ascontiguousarray(out)
