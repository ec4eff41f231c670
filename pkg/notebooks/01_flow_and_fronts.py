# A first look: maximum flows on a hypergraph and the cut/balance front.
# Run with `python3 notebooks/01_flow_and_fronts.py`.

import numpy as np

from hyperflowcutter import CutterState, FlowState, Hypergraph, Side, augment_max_flow, extract_cut

# Two routes from vertex 0 to vertex 4, so two hyperedges must go.
h = Hypergraph(5, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 4)])
f = FlowState(h, sources=[0], targets=[4])
augment_max_flow(h, f)
print("flow value", f.flow_value)
print("source-side cut", extract_cut(h, f, Side.SOURCE).cut_hyperedges)

# Flow lives on hyperedges: each one remembers which pin it entered at and
# which pin it left from (-1 when unused).
print("flow_from", f.flow_from)
print("flow_to  ", f.flow_to)

# A 6x6 mesh of 4-pin hyperedges. Grow terminal sides from two corners and
# watch the cut evolve while the smaller side catches up.
side = 6
edges = []
for i in range(side - 1):
    for j in range(side - 1):
        v = i * side + j
        edges.append((v, v + 1, v + side, v + side + 1))
mesh = Hypergraph(side * side, edges)

state = CutterState(mesh, [0], [side * side - 1], target_epsilon=0, seed=1)
while state.step():
    pass
print("steps", state.steps, "cut per step", state.cut_history)

# Every recorded entry is the best cut seen for that smaller-block size.
for smaller, cut in state.front.items():
    print(f"  smaller block {smaller:2d}  cut {cut}")

best = state.balanced
grid = best.assignment().reshape(side, side)
print(grid)
print("blocks", np.bincount(grid.ravel()))
