import os

import numpy as np

from mg1li import asymptotics
from mg1li import model
from mg1li import ramaswami

here = os.path.dirname(os.path.abspath(__file__))
geo1 = model.load_model(os.path.join(here, 'geo1.json'))
print(geo1)
print(model.validate_assumptions(geo1).to_dict())

############## reference and decay profile
ref = ramaswami.reference_solution(geo1, 200, sweep_max=40, tol_g=1e-15)
profile = asymptotics.decay_profile(geo1, ref)
print('pi_0 =', ref.pi0, '(1/11 =', 1/11, ')')
print('theta =', profile.theta, 'theta_DI =', profile.theta_di)

############## (pi^(N)_k - pi_k) / r^-N against theta pi_k
print('{0:>4} {1:>4} {2:>22} {3:>22}'.format('N', 'k', 'ratio', 'theta pi_k'))
ns = range(10, 41, 5)
ratios = []
for n in ns:
    approx, _, _ = ramaswami.approximate_distribution(geo1, n, tol_g=1e-15)
    diffs = asymptotics.level_differences(approx, ref, 3)
    ratios.append(diffs.l1_by_level / profile.scale(n))
    for k in range(4):
        print('{0:>4} {1:>4} {2:>22.15g} {3:>22.15g}'.format(
            n, k, ratios[-1][k], profile.theta * ref.level(k).sum()))

try:
    import matplotlib.pylab as plt
except ImportError:
    plt = None
if plt is not None:
    ratios = np.array(ratios)
    plt.figure()
    for k in range(4):
        plt.plot(list(ns), ratios[:, k] / (profile.theta
                                           * ref.level(k).sum()),
                 'o-', label='k = {0}'.format(k))
    plt.axhline(1, color='k', lw=0.5)
    plt.xlabel('N')
    plt.ylabel(r'ratio / $\theta \pi_k$')
    plt.legend()
    plt.grid(which='major', alpha=0.5)
    plt.savefig('geo1_ratios.png', bbox_inches='tight')
