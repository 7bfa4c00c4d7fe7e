"""
Convergence table for the one-point coefficients
================================================

Q_{k,g} compares the exact ratio a_{g,3g-2-k} / (g^k a_{g,3g-2}) with its
leading large-genus prediction. Everything below is exact rational arithmetic;
only the final 6-decimal rendering loses information.
"""

from fractions import Fraction

from wpvol.asymptotics import q_render, q_value, ratio_fn

G_LIST = [20, 40, 60, 80, 100]

# the closed-form ratio functions behind the table
for k in (1, 2, 3):
    print(f"fn_{k}(g) =", ratio_fn(k))
print()

# the table itself; digits are cut, not rounded
print("k  " + "  ".join(f"g={g:<7}" for g in G_LIST))
for k in range(1, 5):
    print(f"{k}  " + "  ".join(q_render(k, g) for g in G_LIST))
print()

# where the two rendering conventions disagree
for k in range(1, 5):
    for g in G_LIST:
        cut, rounded = q_render(k, g), q_render(k, g, rounding="half-up")
        if cut != rounded:
            print(f"k={k} g={g}: exact {q_value(k, g)} -> truncate {cut}, half-up {rounded}")

# Q - 1 decays like 1/g^2 at fixed k
for k in range(1, 5):
    scaled = [float((q_value(k, g) - 1) * g * g) for g in G_LIST]
    print(f"k={k}: g^2 (Q-1) =", " ".join(f"{x:.4f}" for x in scaled))

assert q_value(1, 20) == Fraction(182600, 182520)
