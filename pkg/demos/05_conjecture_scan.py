"""
Is the polygon bound state always simple?
=========================================

Scan m = 1..48 and record the multiplicity of zero energy together with
the gap between the singular values kept and the ones treated as zero.
The command-line equivalent is ``multipoint scan --m-max 48``.
"""

import time

from multipoint import conjecture_scan

start = time.perf_counter()
rows = conjecture_scan(48, workers=4)
print("scan took %.2fs" % (time.perf_counter() - start))

print(" m  mult  sigma_kept     sigma_dropped  margin")
for r in rows:
    print("%2d  %4d  %.3e   %.3e      %.2e" % (r.m, r.multiplicity, r.sigma_min_retained,
                                             r.sigma_max_discarded, r.margin))

print("all simple:", all(r.multiplicity == 1 for r in rows))
