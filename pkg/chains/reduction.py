import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree


def cluster_labels(vectors: np.ndarray, tol: float) -> np.ndarray:
    """Label rows so that rows chained by distance <= tol share a label."""
    m = len(vectors)
    if m <= 1:
        return np.zeros(m, dtype=int)
    pairs = cKDTree(vectors).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return np.arange(m)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    return labels


def mod2_keep(vectors: np.ndarray, tol: float) -> np.ndarray:
    """Indices surviving mod-2 cancellation, one representative per odd cluster."""
    m = len(vectors)
    if m <= 1:
        return np.arange(m)
    labels = cluster_labels(vectors, tol)
    count = labels.max() + 1
    sizes = np.bincount(labels, minlength=count)
    first = np.full(count, m)
    np.minimum.at(first, labels, np.arange(m))
    return np.sort(first[sizes % 2 == 1])


def lex_order(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return np.arange(0)
    return np.lexsort(rows.T[::-1])


def quantize(rows: np.ndarray, tol: float) -> bytes:
    return np.round(np.asarray(rows) / tol).astype(np.int64).tobytes()
