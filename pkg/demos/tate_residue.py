"""The trace of the commutator defect of block operators equals the residue pairing."""

import random

from loom import residue_pairing, tate_cocycle
from loom.samples import random_traceless

rng = random.Random(1)
for _ in range(5):
    a = random_traceless(rng, 2, 2, 2)
    b = random_traceless(rng, 2, 2, 2)
    print(f"trace = {tate_cocycle(a, b)}, residue = {residue_pairing(a, b)}")
