# %% [markdown]
# # Spectral clusters and nodal sets
#
# The unit-width cluster projector on S^2 has L^2 -> L^inf norm
# sqrt((2k+1)/4 pi) by the addition theorem.  Below it is computed from the
# kernel diagonal, and a power-law fit gives the exponent 1/2.

# %%
import numpy as np

from steklov.fitting import fit_exponent
from steklov.harmonics import build_basis, zonal_harmonic
from steklov.nodal import as_eigenpair, extract_nodal_set
from steklov.operators import assemble_dtn, cluster_projector, exact_norm_2_to_inf

# %%
b = build_basis(2, 48)
D = assemble_dtn(b)
pts = []
for k in (8, 12, 16, 24, 32, 48):
    v = exact_norm_2_to_inf(cluster_projector(D, k))
    pts.append((k, v))
    print(f"k={k:2d}  ||chi||_2->inf = {v:.8f}  addition theorem {np.sqrt((2 * k + 1) / (4 * np.pi)):.8f}")
fit = fit_exponent(pts)
print(f"fitted exponent {fit.slope:.4f}")

# %% [markdown]
# ## Nodal lines of zonal harmonics
#
# The zonal harmonic of degree k vanishes on k latitude circles.  Their total
# length grows linearly in k.  For k = 2 the exact length is 4 pi sqrt(2/3).

# %%
rows = []
for k in (2, 4, 8, 16, 32):
    bk = build_basis(2, k)
    ns = extract_nodal_set(as_eigenpair(bk, bk.analyze(zonal_harmonic(bk, k))), refinement=8)
    rows.append((np.sqrt(k * (k + 1.0)), ns.measure))
    print(f"k={k:2d}  nodal length {ns.measure:9.4f}")
print("exact k=2:", 4 * np.pi * np.sqrt(2 / 3))
print("slope in lambda:", round(fit_exponent(rows).slope, 3))
