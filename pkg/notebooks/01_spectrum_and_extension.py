# %% [markdown]
# # Steklov spectrum on the disk and the ball
#
# On the unit ball the Dirichlet-to-Neumann map acts on degree-k spherical
# harmonics as multiplication by k.  Adding a potential V couples degrees,
# and we solve the Galerkin problem for D + V in a truncated harmonic basis.

# %%
import numpy as np

from steklov.harmonics import build_basis, zonal_harmonic
from steklov.potentials import make_potential
from steklov.solver import extension_of_coeffs, interior_boundary_ratio, solve_spectrum

# %% [markdown]
# ## Free spectrum and a cosine potential on the circle
#
# With V = 0 the spectrum is 0, 1, 1, 2, 2, ...  With V = cos(theta) the
# pairs split, and the low eigenvalues stop moving once K is large enough.

# %%
b = build_basis(1, 64)
free = solve_spectrum(None, b)
print("V = 0   :", free.values[:9])

for K in (32, 64, 128):
    bk = build_basis(1, K)
    sp = solve_spectrum(make_potential("cos-lowfreq", bk.grid), bk)
    print(f"K = {K:3d}:", np.round(sp.values[:7], 12))

# %% [markdown]
# ## Interior against boundary norms
#
# A pure degree-k mode extends as r^k f, so the ratio of the ball norm to the
# sphere norm is (kp + n + 1)^(-1/p) for every p.

# %%
b2 = build_basis(2, 32)
for k in (4, 8, 16, 32):
    u = b2.analyze(zonal_harmonic(b2, k))
    prof = extension_of_coeffs(b2, u, p_list=(2, 4))
    for p in (2, 4):
        print(f"k={k:2d} p={p}: measured {interior_boundary_ratio(prof, p):.10f}"
              f"  closed form {(k * p + 3) ** (-1 / p):.10f}")

# %% [markdown]
# ## Where the sup lives
#
# Harmonic extensions attain their maximum on the boundary, and the sup over
# r <= 1 - delta falls off like (1 - delta)^k for a degree-k mode.

# %%
u = b2.analyze(zonal_harmonic(b2, 24))
prof = extension_of_coeffs(b2, u, p_list=(), deltas=(0.0, 0.05, 0.1, 0.2))
for d in (0.0, 0.05, 0.1, 0.2):
    print(f"delta={d:4.2f}  sup={prof.sup_within(d):.6f}  (1-delta)^24 * sup = {(1 - d) ** 24 * prof.sup_within(0):.6f}")
