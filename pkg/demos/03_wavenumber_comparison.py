"""Increasing stability, and what the near-eigenvalue guard is for.

The four-bump potential is reconstructed from scratch at several
wavenumbers, always truncating at K = 2k.  Small k sees only a few
Fourier modes of the target and washes the bumps out; pushing k up widens
the stable band and the error falls, saturating once 2k covers the
subject's effective bandwidth.

The middle of the sweep lands on a genuine interior resonance: at k = 10
the product k x radius = 7.00 sits beside a zero of the first-order
Bessel function (7.016), so the Dirichlet operator on the disk is nearly
singular there -- on any lattice.  The run flags it and proceeds; the
error for that row is resonance contamination, not lack of bandwidth.
The remedy block shows both ways out: nudge the wavenumber off the
eigenvalue, or add attenuation (b > 0 moves the spectrum off the real
axis).  Either restores the trend.
"""

import warnings
from pathlib import Path

import potrecon as pr
from potrecon.errors import NearEigenvalueWarning
from potrecon.outputs import write_heatmap
from potrecon.potentials import FOUR_BUMPS, four_bumps, gaussian_mixture
from potrecon.reconstruction import run_algorithm1

OUT = Path(__file__).parent / "out" / "wavenumbers"
OUT.mkdir(parents=True, exist_ok=True)

grid = pr.build_grid(150, 1.0, 0.7)
inversion = pr.build_grid(80, 1.0, 0.7)
truth = gaussian_mixture(inversion.interior_xy, FOUR_BUMPS)
c = four_bumps(grid)


def sweep(k, b=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearEigenvalueWarning)
        return run_algorithm1(
            grid, c, pr.build_sampling(), k, b=b, m=2.0, mode="full", seed=1,
            inversion_grid=inversion,
            truth_fn=lambda pts: gaussian_mixture(pts, FOUR_BUMPS),
            workers=2,
        )


print("wavenumber sweep (K = 2k, four-bump subject):")
for k in (5.0, 10.0, 20.0):
    res = sweep(k)
    note = ""
    if res.near_eigenvalue:
        note = f"   <- near-eigenvalue flag (proximity {res.resonance_proximity:.3f})"
    print(f"  k = {k:4g}        rel L2 = {res.rel_l2:.3f}{note}")
    write_heatmap(OUT / f"c_rec_k{k:g}", inversion, res.c_inv.values)

print()
print("the k = 10 flag is genuine: k x radius = 7.00 lies beside a zero of")
print("J1 (7.016), an interior resonance of the continuous problem, so a")
print("finer lattice does not clear it.  two remedies:")
shifted = sweep(9.5)
attenuated = sweep(10.0, b=1.0)
print(f"  shift the wavenumber    k = 9.5         rel L2 = {shifted.rel_l2:.3f}")
print(f"  add attenuation         k = 10, b = 1   rel L2 = {attenuated.rel_l2:.3f}")
print("either restores the trend: the flagged row's error was resonance")
print("contamination, not lack of bandwidth")

write_heatmap(OUT / "c_rec_k9p5", inversion, shifted.c_inv.values)
write_heatmap(OUT / "c_truth", inversion, truth)
print(f"\nwrote heatmaps under {OUT}")
