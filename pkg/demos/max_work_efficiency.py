"""
Efficiency at maximum work
==========================

Fix the bath temperatures, then maximise |<W>| over both level spacings.
Small qudits beat Curzon-Ahlborn; large ones approach it.
"""

from swapengine import analysis

print(" T_B/T_A    d    eta_m     eta_CA")
for r in (0.2, 0.5, 0.8):
    for d in (2, 4, 16, 64):
        res = analysis.efficiency_at_max_work(d, r)
        print(f"  {r:.1f}   {d:4d}   {res.eta_m:.5f}   {res.eta_ca:.5f}")
