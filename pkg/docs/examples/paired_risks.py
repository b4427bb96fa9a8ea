"""Which of two risks feels the other's stress more?

X ~ Gam(3, 1.5) and Y ~ Gam(2, 2.5) are ordered in increasing convex order
but not in the usual order.  Under a symmetric, positively dependent Gumbel
copula, JMES[X|Y] should never exceed JMES[Y|X].
"""
import numpy as np

from jmesrisk import BivariateModel, Gamma, GumbelCopula, jmes
from jmesrisk.orders import check_icx, check_st

x, y = Gamma(3.0, 1.5), Gamma(2.0, 2.5)
print("icx:", check_icx(x, y).verdict, "| st:", check_st(x, y).verdict)

model = BivariateModel(x, y, GumbelCopula(3.0))
print(f"{'alpha':>6} {'beta':>6} {'JMES[X|Y]':>10} {'JMES[Y|X]':>10}")
for a in np.linspace(0.0, 0.9, 4):
    for b in (0.5, 0.9):
        print(f"{a:6.2f} {b:6.2f} {jmes(model.swap(), a, b):10.4f} {jmes(model, a, b):10.4f}")
