# coding: utf-8

# # Characteristic roots and stability
#
# For x' = a x + sum_j a_j x(t - j h) the characteristic roots are found
# branch by branch with a Newton iteration on the Lambert W form of the
# characteristic equation.  The root with the largest real part decides
# stability.

# In[1]:

from lambertdde import DelaySystem, Preshape, compute_spectrum, stability


# Two delays, a = -1, a_1 = -1, a_2 = -1/2, h = 1.

# In[2]:

sys = DelaySystem(a=-1.0, delay_coeffs=(-1.0, -0.5), h=1.0)
spec = compute_spectrum(sys, depth=2)
for r in spec.roots:
    print(f"n = {r.n:3d}  k = {r.k:2d}  S = {r.S.real: .5f} {r.S.imag:+.5f}i")
print(stability(spec).value)


# Residues: C_n = 1 / delta'(S_n) multiplies x0, while CI_n collects the
# history through the Laplace transforms of the preshape on each delay
# interval.  Here the history is phi = 1 on [-2, 0) and x0 = 1.

# In[3]:

spec = compute_spectrum(sys, depth=5, preshape=Preshape.constant(1.0, 2.0))
for r in spec.roots:
    if 0 <= r.n <= 4:
        print(f"n = {r.n}  C = {r.C.real: .6f} {r.C.imag:+.6f}i"
              f"   CI = {r.CI.real: .6f} {r.CI.imag:+.6f}i")


# With positive delay feedback the rightmost root is real.

# In[4]:

spec = compute_spectrum(DelaySystem(-1.0, (0.5, 0.25), 1.0), depth=3)
print(spec.S0, stability(spec).value)


# Three delays: branch 0 holds a complex pair in the right half plane.

# In[5]:

spec = compute_spectrum(DelaySystem(-1.0, (0.5, -1.0, -1.0), 1.0), depth=2)
print(spec.S0, stability(spec).value, spec.counts)
