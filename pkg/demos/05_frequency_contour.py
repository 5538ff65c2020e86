"""f-mode frequency distribution over the mass-radius plane.

Inverts a compactness-frequency fit on its monotone branch to predict the
oscillation frequency of a star of given mass and radius, reproducing the
frequency-contour view of the M-R parameter space.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dmans.relations import fmode_contour
from dmans.workbench import RunConfig, pooled_fits, resolve_model

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

cfg = RunConfig(model_files=[resolve_model(m)
                             for m in ("nitr_i", "fsugarnet", "tm1")],
                rho_c_n=56, fit_stars_per_model=25)
fits, _ = pooled_fits(cfg, kf_list=[0.0])
fit = fits[0.0]["C_of_omegabar"]

M_grid = np.linspace(1.0, 2.4, 57)
R_grid = np.linspace(9.0, 15.0, 61)
grid = fmode_contour(fit, M_grid, R_grid)
print(f"grid coverage: {np.isfinite(grid).mean() * 100:.0f}% of cells "
      f"inside the invertible branch")
print(f"f at (1.4 Msun, 12.7 km): "
      f"{grid[np.argmin(abs(M_grid - 1.4)), np.argmin(abs(R_grid - 12.7))]:.3f} kHz")

fig, ax = plt.subplots(figsize=(5.4, 4))
pc = ax.pcolormesh(R_grid, M_grid, grid, shading="auto", cmap="plasma")
fig.colorbar(pc, label="f [kHz]")
ax.set_xlabel("R [km]")
ax.set_ylabel(r"M [$M_\odot$]")
fig.tight_layout()
fig.savefig(out / "fmode_contour.png", dpi=140)
print(f"wrote {out}/fmode_contour.png")
