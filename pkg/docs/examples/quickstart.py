"""Conditional risk measures for one bivariate model.

Run: python3 docs/examples/quickstart.py
"""
from jmesrisk import BivariateModel, GaussianCopula, Normal, full_report
from jmesrisk.oracle import mc_jmes

model = BivariateModel(Normal(), Normal(), GaussianCopula(0.75))
report = full_report(model, alpha=0.95, beta=0.95)

for name in ("VaR", "CoVaR", "ES", "MES", "JMES", "dJMES", "drJMES"):
    print(f"{name:>7}: {report[name]:8.4f}")

# the same JMES by simulation, as an independent check
est = mc_jmes(model, 0.95, 0.95, n=2_000_000, seed=1)
print(f"MC JMES: {est.value:.4f} +- {est.std_error:.4f}")
