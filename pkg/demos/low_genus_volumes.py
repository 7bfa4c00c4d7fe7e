"""
Low-genus volumes two ways
==========================

Brackets [tau_d]_{g,n} are computed from psi-kappa_1 intersection numbers
(route "def") and from the differentiated boundary-length recursion (route
"rec"). The two must agree exactly.
"""

from wpvol.volumes import (
    admissible_vectors,
    bracket_def,
    bracket_rec,
    export_volume_polynomial,
    one_point_coeff,
    volume,
    volume_polynomial,
)

# a few volumes
for g, n in [(0, 4), (1, 1), (1, 2), (2, 0), (2, 1), (3, 1), (4, 0)]:
    print(f"V_{g},{n} =", volume(g, n))
print()

# the full polynomial V_{1,2}(L1, L2), stored in the 2L convention
print(export_volume_polynomial(volume_polynomial(1, 2)))

# one-boundary coefficients a_{g,k}
for g in (1, 2, 3):
    print(f"g={g}:", ", ".join(str(one_point_coeff(g, k)) for k in range(3 * g - 1)))
print()

# cross-check both routes on every admissible vector
count = 0
for g, n in [(0, 5), (1, 3), (2, 2), (3, 1)]:
    for d in admissible_vectors(g, n):
        assert bracket_rec(g, n, d) == bracket_def(g, n, d)
        count += 1
print(count, "brackets agree across routes")
