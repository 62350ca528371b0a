"""Build truncated Cayley balls and measure how thin their triangles are.

Free groups give trees; free products of finite cyclic groups give graphs
assembled from complete-graph blocks.  The fine-triangle constant is the
smallest positive integer bounding the distance between comparison points
slid along two sides of any triangle, scanned exactly on half-integer
positions of the geometric realization.
"""

from hypercomb import (
    check_ab6de,
    export_ball,
    fine_delta,
    free_group_ball,
    free_product_cyclic_ball,
    ingest_graph,
)

print("== free group of rank 2, radius 4 ==")
ball = free_group_ball(2, 4)
g = ball.graph
print(f"vertices: {g.n_vertices}, geometric edges: {g.n_geometric_edges}, "
      f"valency bound: {g.valency_bound}")
print(f"radius {ball.radius}, trusted radius {ball.trust_radius}")
report = fine_delta(ball, mode="exact", inner_radius=3)
print(f"fine-triangle supremum (doubled): {report.sup_doubled}  ->  "
      f"delta = {report.delta}   (trees are as thin as it ever gets)")

print()
print("== Z/3 * Z/3, radius 4 ==")
cactus = free_product_cyclic_ball([3, 3], 4)
print(f"vertices: {cactus.graph.n_vertices} "
      f"(each factor contributes a triangle block)")
report = fine_delta(cactus, mode="exact", inner_radius=2)
print(f"delta = {report.delta}, scanned {report.triples_scanned} "
      f"triangle/geodesic combinations")

print()
print("== a square, ingested from the text format ==")
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
report = fine_delta(square, mode="exact")
print(f"delta = {report.delta}: antipodal pairs have two geodesics, and "
      f"comparison points on them sit at distance 2")
worst = report.worst
print(f"worst triangle: apex {square.graph.vertex_ids[worst.apex]}, "
      f"corners {[square.graph.vertex_ids[worst.corner_y], square.graph.vertex_ids[worst.corner_z]]}")

print()
print("== distance growth along a geodesic, seen from the side ==")
ball6 = free_group_ball(2, 6)
g6 = ball6.graph
beta = g6.fixed_geodesic(g6.vertex_index("aaa"), g6.vertex_index("bbb"))
v = g6.vertex_index("ABA")
dist = g6.distances_from(v)
b0 = min(range(len(beta)), key=lambda i: dist[beta[i]])
slack = check_ab6de(g6, v, beta, b0, delta=1)
print(f"d(v, beta(j)) >= d(v, beta) + |j| - 2*delta holds with worst slack "
      f"{slack.min_slack} over {slack.checked} parameters")

print()
print("== deterministic export ==")
text = export_ball(free_product_cyclic_ball([2, 2], 3))
print("Z/2 * Z/2 at radius 3 is a path of 7 vertices:")
print("\n".join(text.splitlines()[:10]))
print("...")
