"""The tent curve: critical exponent against analysis anisotropy.

Scanning the estimated critical exponent over analysis anisotropies
diag(alpha, 2 - alpha) traces a tent that peaks exactly at the field's
own anisotropy, with peak value equal to the self-similarity index:
measuring smoothness is sharpest in the geometry the texture was built
with. Uses a 512 grid and 8 realizations to keep the demo quick; the
acceptance suite runs the full 1024 x 16 experiment.
"""
import numpy as np

from anisotex import FieldSpec, scan_anisotropy, synthesize_ensemble, tent_prediction

ALPHA0, HURST = 0.6, 0.4
spec = FieldSpec.make(ALPHA0, HURST, grid_n=512, seed=31415)
print(f"synthesizing 8 realizations of alpha0={ALPHA0}, hurst={HURST}, 512^2 ...")
fields = synthesize_ensemble(spec, 8)

grid = [round(0.2 + 0.05 * k, 10) for k in range(33)]
scan = scan_anisotropy(fields, grid, p=2.0)

print(f"\n{'alpha':>6} {'estimate':>9} {'tent':>7}   curve")
for a, e in zip(scan.alphas, scan.exponents):
    tent = tent_prediction(a, ALPHA0, HURST)
    bar = "#" * int(round(60 * max(e, 0.0)))
    marker = " <-- argmax" if a == scan.argmax_alpha else ""
    print(f"{a:6.2f} {e:9.4f} {tent:7.4f}   {bar}{marker}")

rms = np.sqrt(np.mean([(e - tent_prediction(a, ALPHA0, HURST)) ** 2
                       for a, e in zip(scan.alphas, scan.exponents) if 0.3 <= a <= 1.7]))
print(f"\nargmax = {scan.argmax_alpha} (true anisotropy {ALPHA0})")
print(f"peak   = {scan.peak:.4f} (true index {HURST})")
print(f"rms deviation from the tent over [0.3, 1.7] = {rms:.4f}")
