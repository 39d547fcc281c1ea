"""One-dimensional Brownian motion on [-1, 1].

Three independent routes to the same polynomials: the closed form, the ODE
recursion, and averaging over the two possible exit points.
"""

# %%
from fractions import Fraction

from essig import interval

ode = interval.ode_recursion(8)
for n in range(2, 9):
    same = ode[n] == interval.closed_form_level(n) == interval.two_point_enumeration(n)
    print(n, same, [str(c) for c in ode[n].coeffs])

# %% a shifted, stretched interval is a dilation of the unit one
v = interval.evaluate_interval(ode, Fraction(1), Fraction(0), Fraction(4))
print("levels at x=1 on [0, 4]:", [str(lev[0]) for lev in v.levels])
