"""ac amplitude sensing and the pulse-width shift of a lock-in spectrum."""
import numpy as np

from spdmbi.protocols import AcProtocolParams, LockinParams, ac_signal, lockin_effective

N = 20
print("ac signal J_{z,n} around the lock point B_dc = 2 B_ac / pi (n = 3)")
for x in (-0.02, -0.01, 0.0, 0.01, 0.02):
    p = AcProtocolParams(n_particles=N, n_cycles=3, chi=0.04 * np.pi).at_modulation(x)
    s = ac_signal(p, "SCS")[0]
    g = ac_signal(p, "GHZ")[0]
    print(f"  x={x:+.2f}  phi={p.phi:+.4f}  SCS {s:+8.4f}  GHZ {g:+8.4f}")

# effective-Hamiltonian spectra for finite-width pulses about y and about x
ws = 200 * np.pi
grid = np.linspace(-0.01, 0.01, 2001)
for axis in ("y", "x"):
    p = LockinParams("CPMG", axis, 100, t_omega=0.2 * np.pi / ws, omega_s=ws, chi=0.001 * ws, n_particles=N)
    sig = lockin_effective(p, f"CP_finiteWidth_{axis}", "SCS", grid)["signal_eff"]
    i = np.flatnonzero(np.sign(sig[:-1]) != np.sign(sig[1:]))
    zero = grid[i[np.argmin(np.abs(grid[i]))]] if len(i) else np.nan
    print(f"pulses about {axis}: crossing nearest resonance at dtau/tau = {zero:+.5f}")
