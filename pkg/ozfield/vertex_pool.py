# ozfield/vertex_pool.py

from multiprocessing import Pool, cpu_count
from typing import List, Optional

import numpy as np

from selfcomm.decompose import self_commutator_decompose


def _decompose_single(value: np.ndarray) -> np.ndarray:
    return self_commutator_decompose(value).factors[0][0]


class VertexDecomposer:
    """Per-vertex self-commutator factors; results keep vertex-id order."""

    def __init__(self, workers: Optional[int] = None):
        if workers is None or workers < 1:
            workers = max(1, cpu_count() - 1)
        self.workers = workers

    def decompose(self, values: List[np.ndarray]) -> List[np.ndarray]:
        if self.workers == 1 or len(values) < 2:
            return [_decompose_single(v) for v in values]

        with Pool(self.workers) as pool:
            results = pool.map(_decompose_single, values)
        return results
