"""
A solvable example and the limits of the contraction argument
=============================================================

With ``a(1,1) = A*`` and all other rates zero, only monomers coagulate.
The monomer density solves a Riccati equation, dimers follow by variation
of constants, and larger sizes relax linearly. The simulator is checked
against this closed form. For ``A* s_1 >= 4 R*^2`` the contraction bracket
stays positive, yet the solution still converges exponentially.
"""
from forcedcoag import (ExampleParams, example_decay_rate, exact_c1, exact_c2, exact_equilibrium,
                        riccati_constants, smallness_gap_demo)
from forcedcoag.verify import format_checks, verify_example

p = ExampleParams(A_star=1.0, R_star=1.0, gamma=1.0, s=(1.0, 0.5))
rc = riccati_constants(p)
print(f"Q1 = {rc.Q1_plus:.12f}, alpha_ric = {rc.alpha_ric:.12f}")
print("Q =", exact_equilibrium(p, 4))
for t in (0.5, 1.0, 2.0, 5.0):
    print(f"t={t:3.1f}  c1={exact_c1(p, t):.12f}  c2={exact_c2(p, t):.12f}")
print(f"guaranteed decay rate {example_decay_rate(p):g}")

print(format_checks(verify_example(p)))

gap = smallness_gap_demo(ExampleParams(s=(4.0,)))
print(f"\nwith s1 = 4: bracket >= {gap.contraction_bracket_lower:g} > 0, "
      f"but solutions converge at rate {gap.observed_rate:g}")
