"""Injecting stuck-at faults and voting the three versions back together.

Walks a handful of single and double faults through combo 6
(IDENTITY | RESO | E_RESWO) and shows each version's result beside the vote.
"""
from ftealu import AluOp, FaultSet, Word, execute_version, ft_ealu, golden, make_combo

combo = make_combo(6, 4)
a, b = Word(4, 0b0011), Word(4, 0b0001)

print("ADD 0011 + 0001, golden", golden(AluOp.ADD, a, b))
print(f"{'faults':<12}" + "".join(f"{t.name:>10}" for t in combo) + "    vote")
for spec in ("-", "A0@1", "A1@1", "B2@0", "A1@1|B1@1", "A3@0|B0@1"):
    fs = FaultSet.parse(spec)
    outs = [execute_version(AluOp.ADD, a, b, t, fs, j).decoded for j, t in enumerate(combo)]
    voted = ft_ealu(AluOp.ADD, a, b, fs, combo)
    mark = "ok" if voted == golden(AluOp.ADD, a, b) else "WRONG"
    print(f"{spec:<12}" + "".join(f"{str(o):>10}" for o in outs) + f"    {voted} {mark}")

# a transient flip touches one version only, so two-of-three always wins
fs = FaultSet.parse("T1:A0")
print("\ntransient T1:A0 ->", ft_ealu(AluOp.ADD, a, b, fs, combo))
