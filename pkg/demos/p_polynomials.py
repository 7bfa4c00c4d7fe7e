"""
Polynomials behind the large-genus expansion
============================================

C(d; g) = <tau_d tau_{big}>_g / <tau_{3g-2}>_g, suitably normalized, is a
polynomial in 1/g. P_d(g) = (6g)^{|d|} C(d; g) is computed by a recursion in
d and cross-checked against Lagrange interpolation through exact correlators.
"""

from wpvol.asymptotics import c1_closed, c_expansion, c_value, p_poly, p_poly_oracle

for d in [(1,), (2,), (3,), (2, 2), (1, 1, 1)]:
    p = p_poly(d)
    assert p == p_poly_oracle(d)
    print(f"P{d} =", p)
print()

# C as a series in 1/g, with the closed form for the 1/g term
for d in [(2,), (3,), (2, 2), (2, 2, 2)]:
    print(f"C{d}: coefficients", [str(c) for c in c_expansion(d)], " c1 closed form", c1_closed(d))
print()

# values at integer genus are the ratio of correlators
print("C((2,); 5) =", c_value((2,), 5))

# P_(6) is integer valued but its coefficients are not all integers
p6 = p_poly((6,))
print("P(6) =", p6)
print("all coefficients integral:", p6.is_integral())
print("integer at g = 1..10:", all(p6(g).denominator == 1 for g in range(1, 11)))
