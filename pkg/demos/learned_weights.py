"""Training a per-bit weight table and comparing it with majority voting.

Uses the exhaustive width-4 benchmark (every operand pair, every single and
double stuck-at fault, all six ops).  Takes a few seconds.
"""
import tempfile
from pathlib import Path

import numpy as np

from ftealu import MAJORITY, TrainingConfig, WeightTable, build_dataset, evaluate, train_weights
from ftealu.scoring import NormalizationKind, ScoringScheme
from ftealu.training import vote

cfg = TrainingConfig(width=4)
ev = evaluate(build_dataset(cfg), cfg.transforms)
print(f"{len(ev)} scenarios, versions {ev.versions}")

majority = np.mean(vote(ev, MAJORITY) == ev.golden)
print(f"majority vote coverage {majority:.4f}\n")

for scheme in ScoringScheme:
    for norm in NormalizationKind:
        table = train_weights(ev, cfg.with_(scheme=scheme, normalization=norm))
        cov = np.mean(vote(ev, table) == ev.golden)
        print(f"{scheme.name:<18} {norm.name:<19} coverage {cov:.4f}")

table = train_weights(ev, cfg)
print("\nlearned table (rows = versions, columns = result bits 0..3):")
with np.printoptions(precision=3, suppress=True):
    print(table.weights)

# weight tables round-trip through a small text file
path = Path(tempfile.mkdtemp()) / "weights.txt"
table.save(path)
print(f"\n{path.name}:\n{path.read_text()}")
assert WeightTable.load(path).dumps() == table.dumps()
