import os

from mg1li import asymptotics
from mg1li import gmatrix
from mg1li import model
from mg1li import oracle
from mg1li import ramaswami

here = os.path.dirname(os.path.abspath(__file__))
mp2 = model.load_model(os.path.join(here, 'mp2.json'))
print(model.drift(mp2).to_dict())

############## truncation level from the error bound
ref = ramaswami.reference_solution(mp2, 200)
profile = asymptotics.decay_profile(mp2, ref)
for eps in (1e-3, 1e-6, 1e-9):
    print('epsilon = {0:g}: N* = {1}'.format(
        eps, asymptotics.select_n(profile, eps)))

############## aperiodicity of G
approx, gsol, _ = ramaswami.approximate_distribution(mp2, 8)
gsol = gmatrix.spectral_gap(gsol)
print('slem(G) =', gsol.slem, 'margin =', gmatrix.ergodicity_margin(gsol.slem))

############## brute-force cross-check
tm = model.truncate(mp2, 8)
sol = oracle.brute_force_stationary(tm, 500)
print('l1 distance over levels 0..50:',
      oracle.l1_distance(sol.pi_hat, approx, 50))
