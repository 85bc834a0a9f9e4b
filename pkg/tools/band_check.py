"""Measure per-model test accuracy on the snapshot over several split seeds.

Used while calibrating the snapshot generator: prints each model's per-seed
accuracies, the median, and whether the median sits inside its target band.
"""

from __future__ import annotations

import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from careerkit.artifacts import ALL_KINDS, ModelArtifact  # noqa: E402
from careerkit.evaluation import build_report  # noqa: E402
from careerkit.pipeline import PipelineConfig, _train_one, prepare  # noqa: E402
from careerkit.textprep import MASTER_FIELDS  # noqa: E402
from careerkit import classical, neural  # noqa: E402
import numpy as np  # noqa: E402

TARGETS = {"svm": 88.63, "lr": 84.09, "mlp": 84.09, "lstm": 84.09,
           "nb": 79.55, "mnb": 79.55, "dt": 77.27, "knn": 77.27, "cnn": 77.27}
BAND = 12.0
SEEDS = (10, 11, 12, 13, 14)


def run(seeds=SEEDS, kinds=ALL_KINDS):
    accs = {kind: [] for kind in kinds}
    for seed in seeds:
        config = PipelineConfig().with_seed(seed)
        t0 = time.time()
        prepared = prepare(config)
        for kind in kinds:
            t1 = time.time()
            model, _curve = _train_one(kind, prepared, config)
            y_true = prepared.test_labels
            if kind in neural.MODEL_KINDS:
                probs = model.forward_batch(prepared.test_matrix)
                y_pred = probs.argmax(axis=1)
            else:
                y_pred = np.array([classical.predict(model, v).label
                                   for v in prepared.test_matrix])
            report = build_report(y_true, y_pred, list(MASTER_FIELDS), kind)
            accs[kind].append(report.accuracy * 100)
            print(f"  seed {seed} {kind:<5} acc={report.accuracy*100:6.2f} "
                  f"({time.time()-t1:5.1f}s)")
        print(f"seed {seed}: n_train={len(prepared.train_indices)} "
              f"n_test={len(prepared.test_indices)} |V|={len(prepared.vocabulary)} "
              f"total {time.time()-t0:.1f}s")
    print()
    ok = True
    for kind in kinds:
        med = statistics.median(accs[kind])
        target = TARGETS.get(kind, 80.0)
        inside = abs(med - target) <= BAND
        ok = ok and inside
        print(f"{kind:<5} median={med:6.2f} target={target:6.2f} "
              f"band=[{target-BAND:6.2f},{target+BAND:6.2f}] "
              f"{'OK ' if inside else 'MISS'} all={['%.1f' % a for a in accs[kind]]}")
    return ok


if __name__ == "__main__":
    seeds = tuple(int(s) for s in sys.argv[1:]) or SEEDS
    run(seeds)
