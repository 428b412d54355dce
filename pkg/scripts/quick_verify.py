"""Quick identity checks on a freshly trained desk model.

- magnitude 0 of every treatment reproduces the baseline bit-exactly
- full knockout of every layer drops top-5 to exactly 5 / 10
"""

import sys
import time
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from dotenv import load_dotenv  # noqa: E402

load_dotenv(PROJECT_ROOT / ".env")

from src.data.synthetic import SyntheticSpec, synth_dataset  # noqa: E402
from src.harness import SweepConfig, run_sweep  # noqa: E402
from src.model.network import build_network  # noqa: E402
from src.model.reference import DESK_MANIFEST  # noqa: E402
from src.model.training import TrainConfig, train  # noqa: E402
from src.stats.metrics import chance_level  # noqa: E402

TOP_K = 5
LAYERS = ["conv_1", "conv_2", "dense_1", "dense_2"]
TREATMENTS = ["synapse_knockout", "node_knockout", "gaussian"]


def main():
    started = time.time()
    print(f"\n{'=' * 70}")
    print("  Quick verification: identity floor and ceiling")
    print(f"{'=' * 70}\n")

    split = synth_dataset(SyntheticSpec(classes=10, per_class=60, test_per_class=20), seed=0)
    network = build_network(DESK_MANIFEST, seed=0)
    network, _ = train(network, split.train, TrainConfig(epochs=2, seed=0))

    identity = run_sweep(
        SweepConfig(treatments=TREATMENTS, layers=LAYERS, magnitudes=[0.0], trials=2, top_k=TOP_K),
        network=network,
        dataset=split.test,
    )
    floor = run_sweep(
        SweepConfig(
            treatments=TREATMENTS[:2], layers=LAYERS, magnitudes=[1.0], trials=2, top_k=TOP_K
        ),
        network=network,
        dataset=split.test,
    )
    chance = chance_level(split.test.class_frequencies(), TOP_K)

    failures = 0
    print(f"baseline top-{TOP_K}: {identity.baseline!r}   chance: {chance!r}\n")
    for label, result, expected in (
        ("magnitude 0", identity, identity.baseline),
        ("full knockout", floor, chance),
    ):
        for cell in result.cells:
            ok = all(
                r.accuracy == expected for r in result.records if r.cell == cell.key
            )
            failures += not ok
            status = "PASS" if ok else "FAIL"
            print(f"  [{status}] {label:<14} {cell.treatment:<17} {cell.layer:<8} {cell.mean!r}")

    print(f"\n{'=' * 70}")
    print(f"  {failures} failure(s) in {time.time() - started:.1f}s")
    print(f"{'=' * 70}")
    return failures == 0


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
