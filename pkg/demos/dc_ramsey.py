"""dc Ramsey spectra with one-axis twisting switched on.

Prints <Jz>(delta) for the three protocols and shows which combinations keep
the zero crossing pinned at delta = 0 when the pulses are imperfect.
"""
import numpy as np

from spdmbi.protocols import DcProtocolParams, dc_spectrum

N = 20
CHI = 0.04 * np.pi
CAT = f"CAT:{np.pi / 8!r}"
deltas = np.linspace(-np.pi, np.pi, 9)

print("ideal pulses, chi = chi_r = 0.04 pi, N = 20")
print("delta    " + "  ".join(f"{d:+7.3f}" for d in deltas))
for proto, kind in (("I", "SCS"), ("II", "GHZ"), ("III", "GHZ"), ("III", CAT)):
    jz = dc_spectrum(DcProtocolParams(proto, N, CHI, CHI), kind, deltas)["jz"]
    print(f"{proto:>3} {kind[:3]}  " + "  ".join(f"{v:+7.3f}" for v in jz))

# finite Rabi frequency and a 10% area error on every pulse
print("\nsignal at delta = 0 with Omega T = 2 pi, epsilon = 0.1")
for proto in ("I", "II", "III"):
    for kind in ("SCS", "GHZ", CAT):
        p = DcProtocolParams(proto, N, CHI, CHI, omega=2 * np.pi, epsilon=0.1)
        jz0 = dc_spectrum(p, kind, [0.0])["jz"][0]
        print(f"  protocol {proto:<3} {kind[:3]}: <Jz>/N = {jz0 / N:+.2e}")
print("x-axis pulses (I, II) keep the zero exactly; the y-axis echo of III does only for GHZ")
