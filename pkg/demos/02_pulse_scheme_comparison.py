"""Simultaneous dark-state pulse vs two sequential pi pulses.

The conventional swap applies a microwave pi pulse (|0,up> -> |-1,up>) and
then a radio-frequency pi pulse (|-1,up> -> |-1,dn>): the population sits in
the dephasing-exposed intermediate level for the whole first pulse.  The
dark-state scheme drives both transitions at once and rides a superposition
that avoids the intermediate level, so it is both faster (0.17 us vs 0.73 us
at these drive strengths) and less exposed to the noise.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from darkpol import default_params, scenario_fig3

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

p_sim = default_params()                      # Omega1 = Omega2 = 13
p_seq = p_sim.with_(Omega1=4.3, Omega2=4.3)   # typical sequential-swap drives

table = scenario_fig3(p_sim, p_seq)
t = table.columns["t_us"]

fig, ax = plt.subplots(figsize=(7, 4.2))
ax.plot(t, table.columns["p_down_sim_mixed"], "k-.", lw=1.6, label="simultaneous pulses")
ax.plot(t, table.columns["p_down_seq_mixed"], "r-", lw=1.4, label="sequential pi pulses")
ax.axvline(table.metadata["sim_max_time_mixed"], color="gray", lw=0.8, alpha=0.6)
ax.set_xlabel(r"$t$ ($\mu$s)")
ax.set_ylabel(r"nuclear $p_\downarrow$")
ax.set_title("mixed nuclear start, kappa = 1/58")
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(out_dir / "pulse_scheme_comparison.png", dpi=150)

md = table.metadata
print(f"simultaneous maximum p_down = {md['sim_max_mixed']:.4f} at "
      f"t = {md['sim_max_time_mixed']:.4f} us")
print(f"sequential p_down at that time = {md['seq_at_sim_max_mixed']:.4f} "
      f"(its own maximum {md['seq_max_mixed']:.4f} arrives at the end of both pulses)")
print(f"pure |0,up> start: {md['sim_max_up']:.4f} vs {md['seq_at_sim_max_up']:.4f}")
print(f"wrote {out_dir / 'pulse_scheme_comparison.png'}")
