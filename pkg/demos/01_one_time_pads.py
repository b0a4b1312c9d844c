"""What a one-time pad does to a single qubit.

A classical pad (random X) only hides the Z component of the Bloch vector.
A quantum pad (random X and Z) hides everything: the padded state is I/2.
"""
import numpy as np

from qleak import COTP, NO_OTP, QOTP, BlochVector, bloch_to_density, density_to_bloch, otp_average

rng = np.random.default_rng(0)
v = BlochVector(0.9, 1.0, 0.4)
rho = bloch_to_density(v)
print("victim Bloch vector (x, y, z):", np.round(v.cartesian, 4))

for scheme in (NO_OTP, COTP, QOTP):
    out = density_to_bloch(otp_average(scheme, rho))
    print(f"{scheme.kind:>5}: padded Bloch vector {np.round(out.cartesian, 4)}")

# the classical pad keeps x, so an attacker measuring along X still learns something
print("\nX component kept by COTP:", round(v.cartesian[0], 4))
