"""Certified decay envelopes for combing-chain differences.

Moving one endpoint of a combing chain by a single step changes its
coefficients only near the moved end; the change decays exponentially in
the distance from the probed edge.  Each fit below computes exact
differences on a seeded sample, estimates a decay base by least squares,
then inflates the multiplier until the envelope holds with zero
violations on the whole sample.
"""

from hypercomb import BicombingEngine, fit_all, free_group_ball, free_product_cyclic_ball

for label, ball in (
    ("free group F2, radius 7", free_group_ball(2, 7)),
    ("Z/3 * Z/3, radius 7", free_product_cyclic_ball([3, 3], 7)),
):
    engine = BicombingEngine(ball)
    constants, raw = fit_all(engine, 800, seed=17)
    print(f"== {label} (delta = {constants.delta}) ==")
    for name, env in (("far endpoint moved", constants.bb),
                      ("near endpoint moved", constants.aa),
                      ("both endpoints moved", constants.main)):
        print(f"  {name:22s} base {env.base:.4f}  scale {env.scale:8.3f}  "
              f"rows {env.n_rows}  nonzero {env.n_nonzero}  "
              f"violations {env.violations}")
    print(f"  far-regime rows (exact zero required): "
          f"{constants.aa_far_checked} checked, "
          f"{constants.aa_far_violations} violations")
    print(f"  waypoint map, toward-point moved: base "
          f"{constants.fbar_toward.base:.4f}, violations "
          f"{constants.fbar_toward.violations}")
    print(f"  waypoint map, from-point moved under the small-product "
          f"hypothesis: half-difference {constants.fbar_from_half_diff:.3f} "
          f"(contracts: {constants.fbar_from_contracts})")
    print(f"  two-sided product bound: Q = {constants.pq['Q']:.3f}, "
          f"base {constants.pq['sigma0']:.4f}, "
          f"violations {constants.pq['violations']}")
    print(f"  geometric-tail bound: K = {constants.kla['K']:.3f}, "
          f"violations {constants.kla['violations']}")
    print(f"  whole-chain step bound: l1 change <= "
          f"{constants.step_lipschitz.slope:.3f} * d + "
          f"{constants.step_lipschitz.offset:.3f}, "
          f"violations {constants.step_lipschitz.violations}")
    print()

print("Note: the simple averaged waypoint distribution can place unit point")
print("masses at different spots when the from-point moves, so its measured")
print("half-difference reaches 1 on trees; the downstream chain-difference")
print("envelopes above still certify with decaying bases.")
