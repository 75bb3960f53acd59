"""Follow one quantum trajectory: entanglement growth under monitoring.

Shows the three growth regimes on a single chain: ballistic growth without
measurements, suppressed growth at moderate monitoring, and Zeno pinning at
strong monitoring.  Run with `python demos/02_single_trajectory.py`.
"""

import numpy as np

from monfermi import (
    MonitorConfig,
    build_hamiltonian,
    growth_regimes,
    neel_state,
    run_trajectory,
)

L = 32
ham = build_hamiltonian(1.0, np.zeros(L))

print(f"Neel quench on {L} sites, half-chain entropy S(t) in nats")
print(f"{'t':>5} | " + " | ".join(f"gamma={g:<4}" for g in (0.0, 0.3, 2.0)))

records = {}
for gamma in (0.0, 0.3, 2.0):
    cfg = MonitorConfig(gamma=gamma, t_max=2.0 * L)
    records[gamma] = run_trajectory(ham, neel_state(L), cfg, seed=2024)

times = records[0.0].times
for k in range(0, len(times), 8):
    row = " | ".join(f"{records[g].entropy_profiles[k, L // 2 - 1]:9.3f}" for g in records)
    print(f"{times[k]:5.0f} | {row}")

print()
for gamma, rec in records.items():
    est = growth_regimes(rec.times, rec.entropy_profiles[:, L // 2 - 1])
    print(
        f"gamma={gamma}: early linear rate {est.linear_rate:.3f}, "
        f"log coefficient {est.log_coefficient:.3f}, saturation {est.saturation:.3f} "
        f"({rec.event_count} measurement events)"
    )
