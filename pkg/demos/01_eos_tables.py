"""Build the unified NITR-I equation of state and look at it.

Walks through the full EOS pipeline: solve the mean-field core in beta
equilibrium, attach the bundled crust, admix a dark-matter gas, and
inspect pressure and sound speed.  Writes CSV tables and a figure to
demos/out/.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dmans.dm import DMParameterSet, solve_higgs
from dmans.eos import admix_dm, attach_crust, load_crust
from dmans.rmf import RMFParameterSet, build_core_table, saturation_properties
from dmans.workbench import resolve_model

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

params = RMFParameterSet.from_file(resolve_model("nitr_i"))
sat = saturation_properties(params)
print(f"{params.model_name} saturation: rho0 = {sat.rho_sat:.4f} fm^-3, "
      f"E/A = {sat.E_sat:.3f} MeV, K = {sat.K_sat:.1f} MeV, "
      f"J = {sat.J_sat:.2f} MeV, L = {sat.L_sat:.2f} MeV")

core = build_core_table(params)
crust = load_crust()
tables = {}
for kf in (0.0, 0.03):
    admixed = admix_dm(core, solve_higgs(kf, DMParameterSet()))
    table = attach_crust(admixed, crust)
    tables[kf] = table
    table.to_csv(out / f"eos_nitr_i_kf{kf:g}.csv",
                 stamp=f"demo EOS model={params.model_name} kf_dm={kf:g}")
    print(f"kf_dm = {kf:g} GeV: {len(table)} rows, junction at "
          f"rho_b = {table.junction_rho:.4f} fm^-3")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
for kf, table in tables.items():
    ax1.loglog(table.eps, table.P, label=f"$k_f^{{DM}}$ = {kf:g} GeV")
    core_sel = table.segments == "core"
    ax2.plot(table.rho[core_sel], table.cs2[core_sel],
             label=f"$k_f^{{DM}}$ = {kf:g} GeV")
ax1.set_xlabel(r"$\varepsilon$ [MeV/fm$^3$]")
ax1.set_ylabel(r"$P$ [MeV/fm$^3$]")
ax1.legend()
ax2.set_xlabel(r"$\rho_b$ [fm$^{-3}$]")
ax2.set_ylabel(r"$c_s^2$")
ax2.axhline(1.0, color="k", lw=0.5)
ax2.legend()
fig.tight_layout()
fig.savefig(out / "eos_nitr_i.png", dpi=140)
print(f"peak core sound speed: cs2 = "
      f"{tables[0.0].cs2[tables[0.0].segments == 'core'].max():.3f} (< 1)")
print(f"wrote {out}/eos_nitr_i.png")
