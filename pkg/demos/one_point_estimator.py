"""A gradient from one function value.

Evaluating f once at z + delta u, with u uniform on the unit sphere, gives
(n / delta) f(z + delta u) u. Its mean is the gradient of the ball-smoothed
function, so it is unbiased for f_hat but very noisy: the noise scales like
n |f| / delta. The learner pays for that with slowly shrinking delta_t.
"""

import numpy as np

from banditgne import sample_sphere
from banditgne.rng import aux_stream

rng = aux_stream(0, 0)
a = np.array([1.0, -2.0, 0.5])
z = np.array([0.3, 0.1, -0.2])


def f(x):
    return float(a @ x) + 10.0  # a large offset inflates the variance, not the mean


for delta in (1.0, 0.3, 0.1):
    draws = []
    for _ in range(50_000):
        u = sample_sphere(3, rng)
        draws.append((3 / delta) * f(z + delta * u) * u)
    draws = np.array(draws)
    se = draws.std(axis=0, ddof=1) / np.sqrt(len(draws))
    print(f"delta {delta:>4}: mean {np.round(draws.mean(axis=0), 3)}  (true {a})  "
          f"stderr {se.max():.3f}  max norm {np.linalg.norm(draws, axis=1).max():.1f}")
