"""
Seeded alpha-corrupted datasets: Setting A (entrywise shifted outliers),
Setting B (two symmetric outlier clusters) and a generic replace-rows adversary.

Random numbers come from numpy's counter-based Philox generator keyed by
(seed, stream). Stream 0 draws the inliers, stream k >= 1 draws outlier block k.
Gaussians are produced by Box-Muller on the generator's uniform doubles so the
draws do not depend on numpy's ziggurat implementation.
"""

# standard libs
import math
from dataclasses import dataclass
from fractions import Fraction

# 3rd party
import numpy as np

# local
from data_loader import DTYPE, Dataset, as_matrix

# constants
SETTINGS = ["a", "b", "custom"]
INLIER_STREAM = 0
UNIFORM_CORRUPTION_HIGH = 3.0
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CorruptedDataset:
    data: Dataset
    inlier_mask: np.ndarray
    oracle_mean: np.ndarray
    seed: int
    setting: str
    # 0 for inliers, k >= 1 for rows of outlier block k
    outlier_block: np.ndarray

    @property
    def n(self):
        return self.data.n

    @property
    def d(self):
        return self.data.d

    @property
    def values(self):
        return self.data.values


def corruption_count(alpha, n):
    """round(alpha * n) with halves rounded up, taking alpha at its shortest
    decimal repr so 0.29 * 50 is exactly 14.5."""
    return math.floor(Fraction(repr(float(alpha))) * n + Fraction(1, 2))


def _check_alpha(alpha):
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"alpha must lie in [0, 0.5), got {alpha}")


def make_generator(seed, stream):
    key = (int(seed) & SEED_MASK) | (int(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def box_muller(rng, shape):
    size = int(np.prod(shape))
    pairs = (size + 1) // 2
    # 1 - U lies in (0, 1], keeping the log finite
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:size].reshape(shape)


def _assemble(blocks, seed, setting):
    """Stack (rows, block_id) pairs; block 0 holds the inliers."""
    values = np.vstack([rows for rows, _ in blocks]).astype(DTYPE)
    outlier_block = np.concatenate([np.full(rows.shape[0], block_id, dtype=int) for rows, block_id in blocks])
    inlier_mask = outlier_block == 0
    oracle_mean = values[inlier_mask].mean(axis=0)

    return CorruptedDataset(
        data=Dataset(values, inlier_mask),
        inlier_mask=inlier_mask,
        oracle_mean=oracle_mean,
        seed=int(seed),
        setting=setting,
        outlier_block=outlier_block,
    )


def gen_setting_a(d, n, alpha, seed):
    """Inliers ~ N(0, I); ceil(k/2) outliers are |N(0, I)| draws, the other
    outliers are N(0, I) draws plus independent U(0, 3) per entry, where
    k = round(alpha * n). Outlier rows follow the inlier rows."""
    if d < 1 or n < 2:
        raise ValueError(f"need d >= 1 and n >= 2, got d={d}, n={n}")
    _check_alpha(alpha)

    n_out = corruption_count(alpha, n)
    n_abs = (n_out + 1) // 2
    n_shift = n_out - n_abs

    inliers = box_muller(make_generator(seed, INLIER_STREAM), (n - n_out, d))

    abs_rng = make_generator(seed, 1)
    folded = np.abs(box_muller(abs_rng, (n_abs, d)))

    shift_rng = make_generator(seed, 2)
    shifted = box_muller(shift_rng, (n_shift, d))
    shifted = shifted + UNIFORM_CORRUPTION_HIGH * shift_rng.random((n_shift, d))

    return _assemble([(inliers, 0), (folded, 1), (shifted, 2)], seed, "a")


def setting_b_centers(d):
    """The two outlier locations (sqrt(d/2), +/-sqrt(d/2), 0, ..., 0)."""
    r = math.sqrt(d / 2.0)
    plus = np.zeros(d, dtype=DTYPE)
    plus[0], plus[1] = r, r
    minus = plus.copy()
    minus[1] = -r
    return plus, minus


def gen_setting_b(d, n, alpha, seed):
    """Inliers ~ N(0, I); outliers split between the two cluster points, the
    '+' cluster taking the extra row when the count is odd."""
    if d < 2 or n < 2:
        raise ValueError(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    _check_alpha(alpha)

    n_out = corruption_count(alpha, n)
    n_plus = n_out - n_out // 2
    n_minus = n_out // 2
    plus, minus = setting_b_centers(d)

    inliers = box_muller(make_generator(seed, INLIER_STREAM), (n - n_out, d))
    blocks = [
        (inliers, 0),
        (np.tile(plus, (n_plus, 1)), 1),
        (np.tile(minus, (n_minus, 1)), 2),
    ]
    return _assemble(blocks, seed, "b")


def generate(setting, d, n, alpha, seed):
    if setting == "a":
        return gen_setting_a(d, n, alpha, seed)
    elif setting == "b":
        return gen_setting_b(d, n, alpha, seed)
    else:
        raise ValueError(f"unknown setting {setting!r}, expected one of {SETTINGS[:2]}")


def corrupt(clean, replacements, indices, seed=0):
    """Definition-1 adversary hook: replace the rows at `indices`."""
    values = np.array(as_matrix(clean), dtype=DTYPE)
    n, d = values.shape
    indices = np.asarray(indices, dtype=int).reshape(-1)
    replacements = np.asarray(replacements, dtype=DTYPE).reshape(-1, d) if len(indices) else np.zeros((0, d))

    if replacements.shape[0] != indices.shape[0]:
        raise ValueError(f"{replacements.shape[0]} replacement rows for {indices.shape[0]} indices")
    if len(np.unique(indices)) != len(indices):
        raise ValueError("indices must be distinct")
    if np.any(indices < 0) or np.any(indices >= n):
        raise ValueError(f"indices must lie in [0, {n})")
    if 2 * len(indices) > n:
        raise ValueError(f"at most n/2 rows may be replaced, got {len(indices)} of {n}")

    values[indices] = replacements
    inlier_mask = np.ones(n, dtype=bool)
    inlier_mask[indices] = False
    outlier_block = np.where(inlier_mask, 0, 1)

    return CorruptedDataset(
        data=Dataset(values, inlier_mask),
        inlier_mask=inlier_mask,
        oracle_mean=values[inlier_mask].mean(axis=0),
        seed=int(seed),
        setting="custom",
        outlier_block=outlier_block,
    )


def from_dataset(dataset, oracle_mean=None, seed=0):
    """Wrap an ingested Dataset; the reference mean comes from `oracle_mean`
    when given, otherwise from the rows labeled as inliers."""
    values = dataset.values
    if dataset.labels is not None:
        inlier_mask = np.array(dataset.labels, dtype=bool)
    elif oracle_mean is not None:
        inlier_mask = np.ones(dataset.n, dtype=bool)
    else:
        raise ValueError("recovery error needs inlier labels or an oracle mean")

    if oracle_mean is None:
        if not inlier_mask.any():
            raise ValueError("no row is labeled as an inlier")
        oracle_mean = values[inlier_mask].mean(axis=0)
    oracle_mean = np.asarray(oracle_mean, dtype=DTYPE).reshape(-1)
    if oracle_mean.shape[0] != dataset.d:
        raise ValueError(f"oracle mean has dimension {oracle_mean.shape[0]}, data has dimension {dataset.d}")

    return CorruptedDataset(
        data=dataset,
        inlier_mask=inlier_mask,
        oracle_mean=oracle_mean,
        seed=int(seed),
        setting="custom",
        outlier_block=np.where(inlier_mask, 0, 1),
    )


def outlier_fraction(ds):
    return float(np.count_nonzero(~ds.inlier_mask)) / ds.n


def recovery_error(estimate, ds):
    estimate = np.asarray(estimate, dtype=DTYPE).reshape(-1)
    if estimate.shape[0] != ds.oracle_mean.shape[0]:
        raise ValueError(f"estimate has dimension {estimate.shape[0]}, expected {ds.oracle_mean.shape[0]}")
    return float(np.linalg.norm(estimate - ds.oracle_mean))
