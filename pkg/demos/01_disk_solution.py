"""Exact expected signature of planar Brownian motion on the unit disk.

Builds the polynomial solution level by level, prints the low levels, and
evaluates it at a few starting points.
"""

# %%
from fractions import Fraction

from essig import disk
from essig.polyring import DISK_FACTOR, divide_exact
from essig.tensor import FLOAT64, rotate

phi = disk.expected_signature_disk(4)

# %% levels 2-4 as polynomials in (z1, z2), factor (1 - |z|^2) pulled out
for n in (2, 3, 4):
    print(f"level {n}")
    for idx, p in enumerate(phi.levels[n]):
        if p.is_zero():
            continue
        word = "".join("1" if b == "0" else "2" for b in format(idx, f"0{n}b"))
        q = divide_exact(p, DISK_FACTOR)
        print(f"  {word}: (1-|z|^2) * ({q})")

# %% the M_n matrices behind each Poisson solve
for n in range(4):
    print(n, disk.build_mn(n).tolist())

# %% values at a rational point are exact
z = (Fraction(1, 3), Fraction(-1, 4))
v = disk.evaluate_phi(phi, z)
print("pi^1111 at", z, "=", v["1111"])

# %% rotating the start point by a quarter turn rotates the tensor
Rz = (-z[1], z[0])
print("quarter turn commutes:", rotate(((0, -1), (1, 0)), v) == disk.evaluate_phi(phi, Rz))

# %% a disk of radius 2 centred at (1, 1): dilation of the unit-disk value
w = disk.transport(phi, (1, 1), 2, (1.5, 1.0), FLOAT64)
print("level 2 on the larger disk:", w.levels[2])
