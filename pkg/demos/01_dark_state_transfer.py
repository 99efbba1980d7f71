"""Dark-state population transfer: lossy three-level model vs exact master equation.

A microwave pulse couples |0,up> <-> |-1,up> and a radio-frequency pulse
couples |-1,up> <-> |-1,dn>, both resonant and balanced.  Driving them
simultaneously moves population from |0,up> to |-1,dn> through the dark
superposition, which keeps the lossy intermediate level |-1,up> almost empty:
its population stays near zero while the target state fills up on the first
peak at t = pi/Omega ~ 0.17 us.

The solid curves integrate the 3x3 non-Hermitian Hamiltonian; the dashed
curves integrate the full 6-level master equation with transverse-hyperfine
flip-flops and off-resonant drive branches.  At first-shell coupling the full
model transfers a few percent less: the flip-flop terms dress the driven
levels (a ~3 rad/us second-order shift each) and effectively detune the pulses.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from darkpol import default_params, polarization_deficit, scenario_fig2

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

p = default_params()
print(f"combined drive Omega = {p.Omega:.4f} rad/us, transfer time pi/Omega = "
      f"{np.pi / p.Omega:.4f} us")
print(f"first-order deficit estimate 3*pi*kappa/(8*Omega) = {polarization_deficit(p):.2e} "
      "(the residue-exact coefficient is 5*pi/8, about 1.7x larger)")

table = scenario_fig2(p, T=0.5)
t = table.columns["t_us"]

fig, ax = plt.subplots(figsize=(7, 4.2))
colors = {"p_0up": "tab:red", "p_mup": "tab:green", "p_mdown": "tab:blue"}
labels = {"p_0up": r"$|0,\uparrow\rangle$", "p_mup": r"$|-1,\uparrow\rangle$",
          "p_mdown": r"$|-1,\downarrow\rangle$"}
for key in ("p_0up", "p_mup", "p_mdown"):
    ax.plot(t, table.columns[f"{key}_nh"], color=colors[key], lw=1.4, label=labels[key])
    ax.plot(t, table.columns[f"{key}_me"], color=colors[key], lw=1.0, ls="--")
ax.set_xlabel(r"$t$ ($\mu$s)")
ax.set_ylabel("population")
ax.set_title("solid: non-Hermitian 3-level model, dashed: 6-level master equation")
ax.legend(loc="center right")
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(out_dir / "dark_state_transfer.png", dpi=150)

print(f"non-Hermitian peak {table.metadata['nh_peak']:.4f} at "
      f"t = {table.metadata['nh_peak_time']:.4f} us; master-equation peak "
      f"{table.metadata['me_peak']:.4f}; max pointwise gap "
      f"{table.metadata['max_gap_mdown']:.4f}")
print(f"wrote {out_dir / 'dark_state_transfer.png'}")
