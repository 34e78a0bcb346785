"""
The acyclicity function
=======================

h(W) = tr exp(W o W) - d is zero exactly when the weighted graph W has no
directed cycle, and it is smooth, so an optimizer can push it to zero.
"""

import numpy as np

from dynotears.acyclicity import h_and_grad, is_acyclic_exact

# a chain 0 -> 1 -> 2 is acyclic
chain = np.array([[0.0, 1.2, 0.0],
                  [0.0, 0.0, -0.7],
                  [0.0, 0.0, 0.0]])
print("chain:      h = %.3g, acyclic = %s" % (h_and_grad(chain)[0], is_acyclic_exact(chain)))

# closing the loop with a weak edge 2 -> 0 makes h positive
loop = chain.copy()
loop[2, 0] = 0.1
print("with 2->0:  h = %.3g, acyclic = %s" % (h_and_grad(loop)[0], is_acyclic_exact(loop)))

# h grows with the weight of the offending edge
for w in (0.01, 0.1, 0.5, 1.0):
    loop[2, 0] = w
    print("  w(2->0) = %-5g h = %.3e" % (w, h_and_grad(loop)[0]))

# the gradient points at the edges that take part in the cycle
_, grad = h_and_grad(loop)
print("gradient of h:")
print(np.round(grad, 3))
