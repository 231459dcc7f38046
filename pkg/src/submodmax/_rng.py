"""Counter-based random streams: row ``i`` of a block depends only on
``(seed, i)``, so blocks can be drawn in any split or order."""
import numpy as np

_BLOCK = 4  # Philox yields four 64-bit words per counter step


def uniform_rows(seed: int, start: int, count: int, width: int) -> np.ndarray:
    steps = max(1, -(-width // _BLOCK))
    bitgen = np.random.Philox(key=int(seed))
    bitgen.advance(int(start) * steps)
    u = np.random.Generator(bitgen).random((int(count), steps * _BLOCK))
    return u[:, :width]
