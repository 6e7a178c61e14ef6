"""Writing a fault campaign to a scenario file and replaying it."""
import tempfile
from pathlib import Path

from ftealu import AluOp, FaultSet, Scenario, Word, ft_ealu, golden, make_combo
from ftealu.faults import read_scenarios, sample_inputs, write_scenarios

W = 16
pairs = sample_inputs(W, 4, seed=7)
faults = ["-", "A0@1", "B15@0|A7@1", "T2:B3"]
scenarios = [Scenario(op, a, b, FaultSet.parse(f))
             for (a, b), f, op in zip(pairs, faults, (AluOp.ADD, AluOp.SUB, AluOp.XOR, AluOp.ADD))]

path = Path(tempfile.mkdtemp()) / "campaign.txt"
write_scenarios(path, scenarios, W)
print(path.read_text())

combo = make_combo(6, W)
for sc in read_scenarios(path):
    out = ft_ealu(sc.op, sc.a, sc.b, sc.faults, combo)
    ok = out == golden(sc.op, sc.a, sc.b)
    print(f"{sc.line():<32} -> {out.value:04x} {'corrected' if ok else 'missed'}")
