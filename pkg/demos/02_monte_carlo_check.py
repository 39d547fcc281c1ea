"""Compare the exact disk solution with simulated Brownian signatures.

Each path is an Euler walk cut exactly at the circle; its signature is the
product of segment exponentials.  The estimate carries standard errors and a
bias allowance from a coupled dt vs dt/4 run.
"""

# %%
import numpy as np

from essig import disk, mc
from essig.tensor import FLOAT64, word_str, words

z = (0.3, 0.4)
phi = disk.expected_signature_disk(4)
exact = disk.evaluate_phi(phi, z, FLOAT64)

# %% 5000 paths keep this under a minute on one core
est = mc.estimate_phi(z, N=4, paths=5000, dt=1e-4, seed=1)
cal = mc.calibrate_bias(z, N=4, paths=5000, dt=1e-4, seed=2)
band = 3 * est.stderr.flat() + cal.allowance(1e-4).flat()

# %%
flat_words = [w for n in range(5) for w in words(2, n)]
for w, m, e, b in zip(flat_words, est.mean.flat(), exact.flat(), band):
    if len(w) in (2, 4) and abs(e) > 1e-12:
        flag = "ok" if abs(m - e) <= b else "OUT"
        print(f"{word_str(w):>5}  mc {m: .5f}  exact {e: .5f}  band {b:.5f}  {flag}")

# %% one sample path, dumped in the CLI's text format
path = mc.sample_bm_exit(z, (0, 0), 1.0, 1e-3, np.random.default_rng(0))
print(len(path.points), "points, ends at radius", np.hypot(*path.points[-1]))
print(mc.format_path_dump(path).splitlines()[:3])
