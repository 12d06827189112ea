"""Factor a loop, read its splitting type, and compare with cohomology and tau."""

import random

from loom import LaurentMatrix, birkhoff_full, cohomology_p1, lattice_dvector, splitting_type, tau
from loom.samples import random_loop


rng = random.Random(4)
for _ in range(4):
    gamma = random_loop(rng, 2)
    F = birkhoff_full(gamma)
    coh = cohomology_p1(gamma)
    print(gamma)
    print(f"  birkhoff d = {F.d.values}, lattice d = {lattice_dvector(gamma).values}")
    print(f"  splitting type {splitting_type(gamma).values}, h0 = {coh.h0}, h1 = {coh.h1}")
    print(f"  tau = {tau(gamma)}")
    assert F.product().agrees_with(gamma)

# the two d-vectors are different invariants: this loop has lattice d (-1, 1) but is in the big cell
upper = LaurentMatrix.parse([["1", "z^-1"], ["0", "1"]])
print(f"{upper}: birkhoff d = {birkhoff_full(upper).d.values}, lattice d = {lattice_dvector(upper).values}")
