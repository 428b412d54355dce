"""Per-trial seed derivation.

derive_seed(base, l, m, t) = splitmix64(splitmix64(base) XOR pack(l, m, t)),
pack = l << 48 | m << 32 | t. For a fixed base seed both splitmix64 steps and
the XOR are bijections, so distinct in-range indices never collide.
"""

from src.errors import DataError
from src.rng import MASK64, splitmix64

MAX_LAYER_INDEX = 0xFFFF
MAX_MAGNITUDE_INDEX = 0xFFFF
MAX_TRIAL_INDEX = 0xFFFFFFFF
SUBSET_SALT = 0x5EED5EED5EED5EED


def pack_indices(layer_index, magnitude_index, trial_index):
    if not (
        0 <= layer_index <= MAX_LAYER_INDEX
        and 0 <= magnitude_index <= MAX_MAGNITUDE_INDEX
        and 0 <= trial_index <= MAX_TRIAL_INDEX
    ):
        raise DataError(
            f"grid indices out of range: layer {layer_index}, "
            f"magnitude {magnitude_index}, trial {trial_index}"
        )
    return (layer_index << 48) | (magnitude_index << 32) | trial_index


def derive_seed(base_seed, layer_index, magnitude_index, trial_index):
    """64-bit seed for one trial; depends only on the base seed and grid indices."""
    packed = pack_indices(layer_index, magnitude_index, trial_index)
    return splitmix64(splitmix64(base_seed & MASK64) ^ packed)


def subset_seed(base_seed):
    """Seed of the shuffle that picks a sweep's evaluation subset."""
    return splitmix64((base_seed & MASK64) ^ SUBSET_SALT)
