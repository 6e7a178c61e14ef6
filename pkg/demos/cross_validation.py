"""k-fold cross-validation of learned weights at width 16.

A reduced version of the full run (40 operand pairs instead of 400) so it
finishes in a few seconds.  Compare held-out and in-sample coverage per
fault class.
"""
from ftealu import TrainingConfig, build_dataset, cross_validate

cfg = TrainingConfig(width=16, samples=40, seed=1, folds=10)
rep = cross_validate(build_dataset(cfg), cfg)

print(f"{'group':<14}{'held-out':>10}{'in-sample':>11}")
for key in ("all", "class=single", "class=double"):
    print(f"{key:<14}{rep.mean_test[key]:>10.4f}{rep.in_sample[key]:>11.4f}")
print(f"\ngeneralization gap {100 * rep.gap:.2f} points")

print("\nper-fold held-out coverage:")
print("  " + " ".join(f"{f['test_all']:.4f}" for f in rep.folds))
