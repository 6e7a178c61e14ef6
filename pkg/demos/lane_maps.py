"""Where each logical bit lives in every execution version.

Prints the lane map of all seven transforms at width 8, then shows how one
stuck lane lands on different logical bits depending on the version.
"""
from ftealu import AluOp, FaultSet, Word, encode, execute_version, golden, make_transform
from ftealu.diversify import TransformKind

W = 8

print(f"logical bit -> physical lane, width {W} (lanes >= {W} are extension lanes)\n")
print(f"{'version':<12}" + "".join(f"{i:>4}" for i in range(W)) + "   fill")
for kind in TransformKind:
    t = make_transform(kind, W)
    lanes = "".join(f"{t.lane_of(i):>4}" for i in range(W))
    print(f"{t.name:<12}{lanes}   {sorted(t.fill_lanes)}")

# the same operand, encoded three ways
x = Word(W, 0b1011_0110)
print(f"\nx = {x}")
for kind in ("IDENTITY", "RESO", "E_RESWO"):
    t = make_transform(kind, W)
    print(f"  {kind:<9} image {encode(t, x):0{t.n_lanes}b}")

# one physical defect, three different logical symptoms
fault = FaultSet.parse("A3@1")
a, b = Word(W, 0x21), Word(W, 0x14)
print(f"\nADD {a.value:#04x} + {b.value:#04x} with operand A lane 3 stuck at 1 "
      f"(golden {golden(AluOp.ADD, a, b).value:#04x})")
for kind in ("IDENTITY", "RESO", "E_RESWO"):
    t = make_transform(kind, W)
    hit = [i for i in range(W) if t.lane_of(i) == 3]
    out = execute_version(AluOp.ADD, a, b, t, fault).decoded
    print(f"  {kind:<9} lane 3 carries logical bit {hit}  -> result {out.value:#04x}")
