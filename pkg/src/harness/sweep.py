"""Sweep execution: perturb a fresh copy per trial, evaluate, aggregate per cell."""

import logging
import time
from multiprocessing import Pool
from typing import NamedTuple

from src.data.dataset import normalize
from src.data.idx import load_idx
from src.data.synthetic import synth_dataset
from src.errors import DataError, SweepError
from src.harness.schemas import CellSummary, SweepResult, TrialRecord
from src.harness.seeds import derive_seed, subset_seed
from src.model.network import predict
from src.model.serialization import load
from src.perturb.treatments import TREATMENTS
from src.rng import make_rng
from src.stats.metrics import mean_std, top_k_accuracy

logger = logging.getLogger(__name__)


class TrialTask(NamedTuple):
    treatment_index: int
    treatment: str
    layer_index: int
    layer: str
    magnitude_index: int
    magnitude: float
    trial: int
    seed: int


class TrialRunner:
    """Runs trials against one pristine network and one fixed evaluation set."""

    def __init__(self, network, dataset, top_k):
        self.network = network
        self.dataset = dataset
        self.top_k = top_k

    def __call__(self, task):
        started = time.perf_counter()
        try:
            perturbed, _ = TREATMENTS[task.treatment](
                self.network, task.layer, task.magnitude, make_rng(task.seed)
            )
            logits = predict(perturbed, self.dataset.images)
            accuracy = top_k_accuracy(logits, self.dataset.labels, self.top_k)
        except Exception as exc:
            raise SweepError(
                f"trial {task.trial} of cell {task.treatment}/{task.layer}/{task.magnitude!r} "
                f"(seed {task.seed}) failed: {exc}"
            ) from exc
        return TrialRecord(
            treatment=task.treatment,
            layer=task.layer,
            magnitude=task.magnitude,
            trial=task.trial,
            seed=task.seed,
            top_k=self.top_k,
            accuracy=accuracy,
            n_images=len(self.dataset),
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )


_worker_runner = None


def _init_worker(network, dataset, top_k):
    global _worker_runner
    _worker_runner = TrialRunner(network, dataset, top_k)


def _run_in_worker(task):
    return task, _worker_runner(task)


def build_tasks(config):
    """Every trial of the grid in canonical (treatment, layer, magnitude, trial) order."""
    tasks = []
    for t_index, treatment in enumerate(config.treatments):
        for l_index, layer in enumerate(config.layers):
            for m_index, magnitude in enumerate(config.magnitudes):
                for trial in range(config.trials):
                    seed = derive_seed(config.seed, l_index, m_index, trial)
                    tasks.append(
                        TrialTask(t_index, treatment, l_index, layer, m_index, magnitude, trial, seed)
                    )
    return tasks


def load_eval_dataset(config):
    """The evaluation set a config points at: IDX files or the synthetic test split."""
    if config.images_path is not None:
        dataset = load_idx(config.images_path, config.labels_path)
    elif config.synthetic is not None:
        dataset = synth_dataset(config.synthetic, config.data_seed).test
    else:
        raise DataError("sweep config names no dataset (images_path/labels_path or synthetic)")
    if config.normalize is not None:
        dataset = normalize(dataset, *config.normalize)
    return dataset


def select_eval_subset(dataset, size, base_seed):
    """First `size` images after a shuffle seeded once per sweep; None keeps everything."""
    if size is None:
        return dataset
    if size >= len(dataset):
        if size > len(dataset):
            logger.warning(
                "eval subset of %d exceeds the %d available images; using all", size, len(dataset)
            )
        return dataset
    order = make_rng(subset_seed(base_seed)).permutation(len(dataset))
    return dataset.subset(order[:size])


def summarize_cells(records, baseline=None):
    """Per-cell mean and sample std, in first-appearance order of the records."""
    grouped = {}
    for record in records:
        grouped.setdefault(record.cell, []).append(record.accuracy)
    cells = []
    for key, accuracies in grouped.items():
        mean, std = mean_std(accuracies)
        drop = None
        if baseline:
            drop = 1.0 - mean / baseline
        cells.append(
            CellSummary(
                treatment=key.treatment,
                layer=key.layer,
                magnitude=key.magnitude,
                trials=len(accuracies),
                mean=mean,
                std=std,
                relative_drop=drop,
            )
        )
    return cells


def _execute(tasks, runner, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [(task, runner(task)) for task in tasks]
    chunksize = max(1, len(tasks) // (workers * 4))
    with Pool(
        processes=workers,
        initializer=_init_worker,
        initargs=(runner.network, runner.dataset, runner.top_k),
    ) as pool:
        return pool.map(_run_in_worker, tasks, chunksize=chunksize)


def run_sweep(config, network=None, dataset=None):
    """Run every (treatment, layer, magnitude, trial) of `config`.

    `network` and `dataset` default to the files the config names. The
    pristine network is never modified; each trial perturbs its own copy.
    Results do not depend on the worker count.
    """
    try:
        if network is None:
            if config.model_path is None:
                raise DataError("sweep config names no model_path")
            network = load(config.model_path)
        if dataset is None:
            dataset = load_eval_dataset(config)
    except OSError as exc:
        raise DataError(f"could not read sweep inputs: {exc}") from exc

    for layer in config.layers:
        network.layer_params(layer)
    eval_set = select_eval_subset(dataset, config.eval_subset, config.seed)
    baseline = top_k_accuracy(predict(network, eval_set.images), eval_set.labels, config.top_k)
    logger.info(
        "baseline top-%d accuracy %.4f on %d images", config.top_k, baseline, len(eval_set)
    )

    tasks = build_tasks(config)
    runner = TrialRunner(network, eval_set, config.top_k)
    logger.info("running %d trials with %d worker(s)", len(tasks), config.workers)
    finished = _execute(tasks, runner, config.workers)
    finished.sort(
        key=lambda pair: (
            pair[0].treatment_index,
            pair[0].layer_index,
            pair[0].magnitude_index,
            pair[0].trial,
        )
    )
    records = [record for _, record in finished]
    cells = summarize_cells(records, baseline)
    for cell in cells:
        logger.info(
            "%s %s %r: %.4f +/- %.4f over %d trials",
            cell.treatment,
            cell.layer,
            cell.magnitude,
            cell.mean,
            cell.std,
            cell.trials,
        )
    return SweepResult(config=config, baseline=baseline, records=records, cells=cells)
