"""
Coagulation kernels and their growth envelopes
==============================================

Every kernel carries constants ``(A*, alpha, beta)`` with
``a(k, l) <= A* (k^alpha l^beta + k^beta l^alpha)``. The moment bounds and
the smallness certificate are built from these constants, so each model
is checked against its envelope on a finite grid.
"""
import numpy as np

from forcedcoag import KernelModel, RateModel, SourceModel, fit_envelope

# The Brownian kernel attains its envelope at the monomer pair (1, 1).
for model in (KernelModel.brownian(), KernelModel.shear(), KernelModel.product(0.2, 0.7)):
    cert = fit_envelope(model, 256)
    print(f"{model.family:10s} A*={model.A_star:g} alpha={model.alpha:.3f} beta={model.beta:.3f}"
          f"  max ratio {cert.max_ratio:.4f} at {cert.argmax}")

# A tabulated kernel is rejected if it leaves its declared envelope.
table = np.array([[1.0, 0.5], [0.5, 0.25]])
print("tabulated:", KernelModel.tabulated(table, 0.5, 0.0, 0.0))

# Removal rates certify a lower bound r_k >= R* k^gamma.
lc = RateModel.li_chen(2.0)
k = np.arange(1, 6)
print("Li-Chen rates      ", np.round(lc.array(5), 4))
print("lower bound R* k^g ", np.round(2.0 * k ** (2.0 / 3.0), 4))

# Source moments sum_k k^mu s_k, including an infinite geometric source.
src = SourceModel.geometric(1.0, 0.5)
print("geometric source moments mu=0..3:", [round(src.moment(mu), 6) for mu in range(4)])
