"""Schoen-Wolfson cones: conformality, Lagrangian angle, structural equation, meshes.

Writes PLY and OBJ meshes of each cone (dropping Im Phi_2) into ./cones_out.
"""
from pathlib import Path

import numpy as np

from hamstat import ConeDescriptor, DiscGrid, sw_cone, verify_hamiltonian_stationary
from hamstat import export

out = Path("cones_out")
for p, q in ((1, 1), (2, 1), (3, 2), (5, 3)):
    desc = ConeDescriptor(p, q)
    line = [f"({p},{q}) maslov {desc.maslov:+d}"]
    res = []
    for h in (1 / 32, 1 / 64):
        grid = DiscGrid(h)
        imm = sw_cone(desc, grid)
        z = grid.Z[grid.inside]
        cf = np.max(np.abs(imm.conformal_factor[grid.inside] / desc.conformal_factor(z) - 1))
        ang = np.max(np.abs(imm.angle[grid.inside] - np.exp(1j * desc.maslov * np.angle(z))))
        rep = verify_hamiltonian_stationary(imm, desc.g, where=np.abs(grid.Z) > 0.25)
        res.append(rep[0]["max"])
    line.append(f"conformal {cf:.1e}  angle {ang:.1e}")
    line.append(f"div(g grad Phi): {res[0]:.2e} -> {res[1]:.2e}")
    print("  ".join(line))
    verts, faces = export.cone_mesh(desc)
    export.atomic_write(out / f"cone_{p}_{q}.ply", export.ply_bytes(verts, faces))
    export.atomic_write(out / f"cone_{p}_{q}.obj", export.obj_text(verts, faces))
print(f"meshes in {out}/")
