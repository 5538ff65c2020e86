"""Universal relations and the GW170817 canonical estimates.

Pools stable-branch stars of three models (for speed; use the CLI for the
full seven-model production fit), fits the compactness-deformability,
frequency-deformability and compactness-frequency relations, and
propagates the GW170817 Lambda_1.4 interval to canonical estimates.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dmans.relations import eval_relation, propagate_gw170817, relative_deviation
from dmans.workbench import (RunConfig, pooled_fits, resolve_model)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

cfg = RunConfig(model_files=[resolve_model(m)
                             for m in ("nitr_i", "fsugarnet", "tm1")],
                rho_c_n=56, fit_stars_per_model=25)
fits, samples = pooled_fits(cfg, kf_list=[0.0])
fit_cl = fits[0.0]["C_of_logLambda"]
fit_ol = fits[0.0]["omegabar_of_logLambda"]

est_c = propagate_gw170817(fit_cl)
est_f = propagate_gw170817(fit_ol)
print(f"C-Lambda coefficients: {np.round(fit_cl.coeffs, 5)}, "
      f"chi2_r = {fit_cl.chi2_reduced:.2e}")
print(f"GW170817 canonical compactness: "
      f"{est_c.central:.3f} (+{est_c.upper - est_c.central:.3f}"
      f"/-{est_c.central - est_c.lower:.3f})")
print(f"GW170817 canonical f-mode: {est_f.central:.3f} "
      f"(+{est_f.upper - est_f.central:.3f}"
      f"/-{est_f.central - est_f.lower:.3f}) kHz")

lam = np.concatenate([s["Lambda"] for s in samples.values()])
C = np.concatenate([s["C"] for s in samples.values()])
dev = relative_deviation(fit_cl, np.column_stack([lam, C]))
print(f"max C-Lambda deviation over the pooled samples: {100 * dev.max():.2f}%")

fig, ax = plt.subplots(figsize=(5, 4))
ax.semilogx(lam, C, ".", ms=4, alpha=0.6, label="pooled stars")
grid = np.geomspace(lam.min(), lam.max(), 200)
ax.semilogx(grid, eval_relation(fit_cl, grid), "k--", label="quartic fit")
ax.axvspan(70, 580, color="tab:blue", alpha=0.12, label="GW170817 band")
ax.set_xlabel(r"$\Lambda$")
ax.set_ylabel("C")
ax.legend()
fig.tight_layout()
fig.savefig(out / "c_lambda_relation.png", dpi=140)
print(f"wrote {out}/c_lambda_relation.png")
