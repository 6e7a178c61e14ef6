"""Three versions against five on the same dataset.

Five versions cost 5/3 as many ALU executions.  One version per transform
family keeps their failures from lining up.
"""
import numpy as np

from ftealu import MAJORITY, TrainingConfig, build_dataset, evaluate, train_weights
from ftealu.training import vote
from ftealu.voting import combo_label

cfg = TrainingConfig(width=16, samples=20, seed=1)
ds = build_dataset(cfg)
print(f"{len(ds)} scenarios at width 16\n")

for combo in (6, "5mr"):
    c = cfg.with_(combo=combo)
    ev = evaluate(ds, c.transforms)
    weighted = np.mean(vote(ev, train_weights(ev, c)) == ev.golden)
    majority = np.mean(vote(ev, MAJORITY) == ev.golden)
    print(f"{combo_label(ev.transforms)}")
    print(f"  majority {majority:.4f}  weighted {weighted:.4f}  ALU executions {ev.executed_ops}")
