"""Audit of the optimal Wente inequality on the symmetric two-point configuration.

For random smooth pairs (a, b) the solution of Delta phi = a_y b_x - a_x b_y
with zero boundary values satisfies |sum d_l phi(p_l)| <= (1/4 pi) int |grad a|^2 + |grad b|^2.
"""
import numpy as np

from hamstat import SingularityConfig, WenteAuditor, WentePair

config = SingularityConfig([0.5, -0.5], [1, -1])
auditor = WenteAuditor(config, h=1 / 128)
reports = auditor.audit(100)
rel = np.array([r.lhs / r.rhs for r in reports])
print(f"pairs: {len(reports)}  violations: {sum(not r.ok for r in reports)}")
print(f"lhs / rhs: min {rel.min():.4f}  median {np.median(rel):.4f}  max {rel.max():.4f}")
worst = max(reports, key=lambda r: r.lhs / r.rhs)
print(f"tightest pair: seed {worst.seed}, lhs {worst.lhs:.5f}, rhs {worst.rhs:.5f}, "
      f"second route {worst.green_route:.5f}")
const = auditor.check(WentePair.constants(1.0, 2.0))
print(f"constant pair: lhs {const.lhs}, rhs {const.rhs}")
