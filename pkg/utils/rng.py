from typing import List

import numpy as np


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based generator (Philox) so child streams split cleanly."""
    return np.random.Generator(np.random.Philox(seed))


def split_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)
