"""Beam steering accuracy on a circular walk around a fixed transmitter.

The receiver circles the transmitter at 10 deg/s, so the true departure
azimuth at time t is exactly 10*t degrees. The link trains a 1-degree
azimuth codebook on every snapshot; the selected beam should track the
walk closely over the front sector and degrade toward the array end-fire.
"""

import math
from pathlib import Path

from tracechan import generate_trace, run_simulation
from tracechan.scenario import build_rt_scenario, build_setup, load_config

cfg = load_config(Path(__file__).resolve().parent.parent / "configs" / "etoile.cfg")
trace = generate_trace(build_rt_scenario(cfg))
metrics = run_simulation(trace, build_setup(cfg))

rows = []
for m in metrics:
    true_az = 10.0 * m.t
    sel_az = m.selection.tx_direction.azimuth_deg
    rows.append((true_az, sel_az, sel_az - true_az))

print(" true az   chosen   error")
for true_az, sel_az, err in rows[::10]:
    print(f"  {true_az:6.1f}  {sel_az:7.1f}  {err:+6.2f}")

body = [e for az, _, e in rows if az <= 70.0]
rmse_body = math.sqrt(sum(e * e for e in body) / len(body))
rmse_all = math.sqrt(sum(e * e for _, _, e in rows) / len(rows))
worst_endfire = max(abs(e) for az, _, e in rows if az >= 75.0)

print()
print(f"RMSE over [0, 70] deg:  {rmse_body:.3f} deg")
print(f"RMSE over full walk:    {rmse_all:.3f} deg")
print(f"worst error past 75:    {worst_endfire:.3f} deg")
