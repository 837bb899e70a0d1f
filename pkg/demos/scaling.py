"""Precision at delta = 0 against particle number: coherent vs entangled input."""
import numpy as np

from spdmbi import analytics as an

ns = [10, 20, 40, 60, 80, 100]
for label, kind, proto, chi in (
    ("SCS, protocol I, chi = 0", "SCS", "I", 0.0),
    ("GHZ, protocol III, chi = 0.04 pi", "GHZ", "III", 0.04 * np.pi),
    ("CAT(pi/8), protocol III, chi = 0.04 pi", f"CAT:{np.pi / 8!r}", "III", 0.04 * np.pi),
):
    pts, k = an.scaling_scan(kind, proto, ns, chi=chi)
    print(f"{label}: exponent {k:+.3f}")
    for q in pts:
        print(f"   N={q.n_particles:>3}  dB={q.precision:.5f}  N*dB={q.n_particles * q.precision:.4f}  qcrb={q.qcrb:.5f}")
