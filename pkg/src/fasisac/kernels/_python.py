"""Pure numpy implementation of the port-candidate kernel (batched over candidates)."""

import numpy as np

LN2 = np.log(2.0)


def candidate_metrics(G_full, W, sel, pos, cands, psi, sigma2):
    """Rate (bits) and sensing gain for each candidate value of ``sel[pos]``.

    ``G_full`` holds the response rows of all M ports; ``sel`` and ``cands``
    are 1-based port indices; ``psi`` is the steering phase step per port.
    """
    sel = np.asarray(sel, dtype=np.int64)
    cands = np.asarray(cands, dtype=np.int64)
    C = cands.size
    if C == 0:
        return np.empty(0), np.empty(0)
    R = np.broadcast_to(sel, (C, sel.size)).copy()
    R[:, pos] = cands
    Gc = G_full[R - 1]  # (C, m0, N)
    A = np.einsum("cmn,mk,ckl->cnl", Gc.conj(), W, Gc) / sigma2
    A += np.eye(G_full.shape[1])
    L = np.linalg.cholesky(A)
    rates = 2.0 * np.log(np.abs(np.diagonal(L, axis1=1, axis2=2))).sum(axis=1) / LN2

    a = np.exp(1j * psi * (R - R[:, :1]))
    gains = np.einsum("cm,mk,ck->c", a.conj(), W, a).real
    return rates, gains
