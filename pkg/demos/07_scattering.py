"""Persistent memory and modified scattering at desk scale.

Two post-processing questions about a finished run: does the memory
term settle toward a persistent profile, and does the memory-corrected
field u - Phi become asymptotically free?  The first is answered by a
late-window time average (the accumulated memory is quadratic in the
data amplitude -- the sweep verifies eps^2 scaling); the second by the
Cauchy residual D(t, 2t) of the corrected field under source-free
re-evolution, which shrinks as t grows.
"""

from cetlab import (Grid, ModelConfig, PowerLawExp, build_quadrature, evolve,
                    memory_limit, padded_r_max, scattering_residual,
                    scattering_residual_fit)

quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)

def run(eps):
    cfg = ModelConfig(epsilon=eps, quad=quad, cfl=0.5, t_final=200.0,
                      r_c=5.0, sigma=1.0)
    grid = Grid(padded_r_max(cfg), 1024)
    return evolve(cfg, grid, cadence=10,
                  snapshot_times=(25.0, 50.0, 100.0, 200.0))

print("amplitude sweep (this is the longest demo; ~15 s):")
norms = {}
for eps in (0.005, 0.01, 0.02):
    rep = memory_limit(run(eps))
    norms[eps] = rep.m_inf_norm
    print(f"  eps = {eps}: |M_inf| = {rep.m_inf_norm:.4e}")
print(f"quadratic scaling checks: "
      f"{norms[0.01] / norms[0.005] / 4:.3f}, "
      f"{norms[0.02] / norms[0.01] / 4:.3f}  (both should be near 1)")

out = run(0.01)
rep = memory_limit(out)
print(f"\nnode-beat period of the 32-node rule: {rep.beat_period:.1f}")
print("(below that period the local memory residual is quasi-periodic;")
print(" decay fits are only meaningful against the beat envelope)")

print("\nCauchy residual of the memory-corrected field:")
for t1 in (25.0, 50.0, 100.0):
    d = scattering_residual(out, t1, 2 * t1)
    print(f"  D({t1:.0f}, {2 * t1:.0f}) = {d:.4e}")
fit = scattering_residual_fit(out, (25.0, 50.0, 100.0))
print(f"fitted decay exponent: {fit.exponent:.3f} (r^2 = {fit.r_squared:.3f})")
print("the residual shrinks strictly faster than the guaranteed t^-1/2:")
print("the null structure of the remaining local source over-complies")
