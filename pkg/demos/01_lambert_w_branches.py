# coding: utf-8

# # Branches of the Lambert W function
#
# Every root of a scalar delay equation is read off one branch of W, the
# multivalued inverse of w -> w e^w.  This script looks at a few branch
# values and at how the w-plane is split between branches.

# In[1]:

import cmath
import math

import numpy as np

from lambertdde import branch_of, lambert_w, lambert_w_real


# On the real axis there are two real branches between -1/e and 0.

# In[2]:

for x in (-0.3, -0.2, -0.1, -0.01):
    print(f"x = {x:6.2f}   W_0 = {lambert_w_real('principal', x): .6f}"
          f"   W_-1 = {lambert_w_real('lower', x): .6f}")


# Complex branches: each W_k(z) solves w e^w = z, and the residual is at
# rounding level on every branch.

# In[3]:

z = complex(-math.e, 0.0)
for k in range(-3, 4):
    w = lambert_w(k, z)
    print(f"k = {k:2d}   W = {w.real: .6f} {w.imag:+.6f}i   "
          f"residual = {abs(w * cmath.exp(w) - z):.1e}")


# The principal branch always has the largest real part.  That is what makes
# the root found on branch 0 the rightmost one, and hence the one that
# decides stability.

# In[4]:

rng = np.random.default_rng(0)
samples = rng.normal(scale=5, size=(500, 2)) @ np.array([1, 1j])
print(all(lambert_w(0, s).real >= max(lambert_w(k, s).real for k in (-2, -1, 1, 2))
          for s in samples))


# Branch labels of a few w values.  Boundaries are the curves
# x = -y cot y, and the half-line w < -1 belongs to W_-1.

# In[5]:

for w in (0.5, -2.0, 1 + 7j, -3 + 3j, 1 - 7j):
    print(w, "->", branch_of(w))
