# %% [markdown]
# # Choosing weights from loss probabilities
#
# If description i is lost with probability p_i, the expected distortion is
# a quadratic in g = g1/(g1+g2).  Its minimizer has a closed form.

# %%
import numpy as np
from scipy.optimize import minimize_scalar

from mdlvq.analysis import ChannelModel, channel_coefficients, optimal_gamma_ratio, quadratic_surrogate

for p1, p2 in ((0.01, 0.1), (0.05, 0.05), (0.2, 0.02)):
    ch = ChannelModel(p1, p2)
    B1, B2 = channel_coefficients(ch)
    choice = optimal_gamma_ratio(ch)
    num = minimize_scalar(lambda g: quadratic_surrogate(g, 0.0, B1, B2), bounds=(0, 1), method="bounded")
    print(f"p = ({p1}, {p2})  g1/g2 = {choice.ratio:.4f}  numeric g = {num.x:.6f}  closed form g = {choice.gamma:.6f}")

# %% [markdown]
# The less reliable description gets the smaller weight, so the side decoder
# that is used more often receives the better reconstruction.

# %%
ps = np.linspace(0.01, 0.3, 6)
print([round(float(optimal_gamma_ratio(ChannelModel(0.05, float(p))).ratio), 3) for p in ps])
