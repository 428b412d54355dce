"""One-command setup: generate the synthetic dataset -> write IDX files -> train and save the desk model."""

import sys
from pathlib import Path

# Ensure project root is on the path
PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from dotenv import load_dotenv  # noqa: E402

load_dotenv(PROJECT_ROOT / ".env")


def main():
    from src.config.settings import configure_logging, get_models_dir
    from src.data.idx import write_idx
    from src.data.synthetic import synth_dataset
    from src.model.network import build_network, evaluate
    from src.model.reference import DESK_DATA_SEED, DESK_MANIFEST, DESK_SYNTHETIC, DESK_TRAINING
    from src.model.serialization import save
    from src.model.training import train, write_history_csv

    configure_logging()
    print("Setting up the CNN perturbation toolkit reference assets\n")

    # Step 1: Generate the synthetic dataset and write it as IDX
    print("[1/3] Generating the synthetic 10-class dataset...")
    split = synth_dataset(DESK_SYNTHETIC, DESK_DATA_SEED)
    data_dir = PROJECT_ROOT / "data" / "synthetic"
    for name, dataset in (("train", split.train), ("test", split.test)):
        write_idx(
            dataset,
            data_dir / f"{name}-images.idx3-ubyte",
            data_dir / f"{name}-labels.idx1-ubyte",
        )
    print(f"  {len(split.train)} train / {len(split.test)} test images in {data_dir}")
    print()

    # Step 2: Train the desk network
    print("[2/3] Training the desk network...")
    network = build_network(DESK_MANIFEST, seed=DESK_TRAINING.seed)
    trained, history = train(network, split.train, DESK_TRAINING)
    for row in history:
        print(f"  epoch {row.epoch}: loss {row.loss:.4f}  train top-1 {row.train_top1:.4f}")
    print()

    # Step 3: Save the container and history
    print("[3/3] Saving the model container...")
    models_dir = PROJECT_ROOT / get_models_dir()
    model_path = save(trained, models_dir / "desk.ablate")
    write_history_csv(history, models_dir / "desk.history.csv")
    scores = evaluate(trained, split.test)
    print()

    print("=" * 50)
    print("Setup complete!")
    print(f"  - Dataset: {data_dir}")
    print(f"  - Model: {model_path}")
    print(f"  - Test top-1: {scores[1]:.4f}  top-5: {scores[5]:.4f}")
    print("=" * 50)


if __name__ == "__main__":
    main()
