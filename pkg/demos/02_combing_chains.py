"""The exact combing chains and their identities.

The one-sided chain from a to b is built by repeatedly stepping a fixed
distance from the far endpoint toward the near one through the averaged
waypoint distribution, then appending averaged geodesic segments.  Its
boundary is exactly b - a, its support never leaves the union of the
geodesics between the endpoints, and on trees it is the geodesic chain
itself.
"""


from hypercomb import BicombingEngine, boundary, free_product_cyclic_ball, ingest_graph, scan_inner_pairs
from hypercomb.generators import free_group_ball

print("== averaged geodesics on a square ==")
square = ingest_graph("""\
base v0
radius 2
trust 2
v v0
v v1
v v2
v v3
e a v0 v1 ar
e ar v1 v0 a
e b v1 v2 br
e br v2 v1 b
e c v2 v3 cr
e cr v3 v2 c
e d v3 v0 dr
e dr v0 v3 d
""")
engine = BicombingEngine(square, delta=2)
g = square.graph
a, b = g.vertex_index("v0"), g.vertex_index("v2")
chain = engine.p_avg(a, b)
print(f"p_avg(v0, v2) = {chain.to_json_dict(g)}")
print(f"boundary: {boundary(g, chain).coeffs}  (+1 at v2, -1 at v0)")
print(f"midpoint distribution: "
      f"{ {g.vertex_ids[v]: str(c) for v, c in engine.p_avg_point(a, b, 1).coeffs.items()} }")

print()
print("== the combing recursion on a tree ==")
ball = free_group_ball(2, 6)
engine = BicombingEngine(ball)
g = ball.graph
src, dst = g.vertex_index("abA"), g.vertex_index("Bab")
chain = engine.qprime(src, dst, check_trust=False)
print(f"q'[abA, Bab] has {len(chain)} edges, all with coefficient 1:")
print(sorted(chain.to_json_dict(g))[:6], "...")
print(f"l1 norm = {chain.l1()} = distance {g.distance(src, dst)}")

way = engine.fbar(dst, src, check_trust=False)
print(f"waypoint from Bab toward abA: "
      f"{ {g.vertex_ids[v]: str(c) for v, c in way.coeffs.items()} } "
      f"(the point ten steps along)")

print()
print("== antisymmetrized chains and areas ==")
cactus = free_product_cyclic_ball([3, 3], 5)
c_engine = BicombingEngine(cactus)
cg = cactus.graph
names = ("s1t1", "s2t1", "t1")
va, vb, vc = (cg.vertex_index(n) for n in names)
print(f"q[a,b] = -q[b,a]: "
      f"{c_engine.q(va, vb, check_trust=False) == -c_engine.q(vb, va, check_trust=False)}")
area = c_engine.area(va, vb, vc, check_trust=False)
print(f"area({names}) = {area}  (the three chains rotate around one triangle)")
tree_area = engine.area(g.vertex_index('ab'), g.vertex_index('ba'),
                        g.vertex_index('AB'), check_trust=False)
print(f"on the tree every area vanishes: {tree_area}")

print()
print("== exhaustive verification over the trusted region ==")
report = scan_inner_pairs(c_engine, extended_sources=20, extended_targets=20,
                          seed=7)
print(f"scanned {report.n_pairs} inner pairs + {report.n_extended_pairs} "
      f"extended pairs: {len(report.violations)} violations")
print(f"largest l1/distance ratio: {report.max_l1_ratio} "
      f"(bound {18 * c_engine.ledger.delta})")
print(f"largest coefficient: {report.max_coeff} "
      f"(bound {c_engine.ledger.coefficient_bound})")
print(f"largest support-to-geodesic distance: {report.max_support_distance} "
      f"(bound {c_engine.ledger.quasigeodesic_C})")

print()
print("== per-pair bound report ==")
bounds = c_engine.verify_bounds(va, vc, check_trust=False)
for row in bounds.rows:
    print(f"  q'[{cg.vertex_ids[row.a]},{cg.vertex_ids[row.b]}]: "
          f"l1={row.l1} <= {row.l1_bound}, coeff={row.coeff_max}, "
          f"support distance {row.support_distance} <= {row.support_bound}")
