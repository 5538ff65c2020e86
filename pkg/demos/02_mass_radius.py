"""Mass-radius curves with and without dark matter.

Solves the TOV equations over the NITR-I unified EOS for a scan of DM
Fermi momenta and reports how the maximum mass and canonical radius
shrink as the DM fraction grows.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dmans.dm import DMParameterSet, solve_higgs
from dmans.eos import admix_dm, attach_crust, load_crust
from dmans.rmf import RMFParameterSet, build_core_table
from dmans.tov import mr_curve, star_at_mass
from dmans.workbench import resolve_model

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

params = RMFParameterSet.from_file(resolve_model("nitr_i"))
core = build_core_table(params)
crust = load_crust()

fig, ax = plt.subplots(figsize=(5, 4))
for kf in (0.0, 0.02, 0.03, 0.04):
    table = attach_crust(admix_dm(core, solve_higgs(kf, DMParameterSet())),
                         crust)
    curve = mr_curve(table, np.geomspace(0.2, 1.15, 80))
    s14 = star_at_mass(curve, 1.4, eos=table)
    print(f"kf_dm = {kf:g} GeV: M_max = {curve.M_max:.3f} Msun at "
          f"R = {curve.R_at_Mmax:.2f} km, R_1.4 = {s14.R:.2f} km")
    ax.plot(curve.radii, curve.masses, label=f"$k_f^{{DM}}$ = {kf:g} GeV")

ax.set_xlabel("R [km]")
ax.set_ylabel(r"M [$M_\odot$]")
ax.set_xlim(9, 15)
ax.legend()
fig.tight_layout()
fig.savefig(out / "mass_radius_dm.png", dpi=140)
print(f"wrote {out}/mass_radius_dm.png")
