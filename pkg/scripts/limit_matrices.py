"""How fast the bubble-dependent matrices approach their eps -> 0 limits.

The exponential-bubble convection matrix reaches its limit once the bubble
average saturates. The special-beta mass matrix does not: its distance to the
limit stencil (h/12) tridiag(-1, 8, 5) equals eps in the infinity norm, so it
only decays algebraically. Also compares the stated mass stencil with the one
obtained from the quadrature inner products (its transpose).
"""
import numpy as np
from _common import out_dir

from bubble_upg.assembly import TridiagonalMatrix, assemble_Mq, assemble_upg_matrix
from bubble_upg.bubbles import BubbleSpec, special_beta
from bubble_upg.report import markdown_table

if __name__ == "__main__":
    d = out_dir(__doc__)
    rows = []
    for n in (8, 64, 512):
        h = 1 / n
        for ratio in (1e-1, 1e-2, 1e-4, 1e-6, 1e-8):
            eps = ratio * h
            ce = assemble_upg_matrix(n, eps, BubbleSpec.exponential(h, eps).average_b)
            gap_c = (ce - TridiagonalMatrix.from_stencil(n - 1, -1, 1, 0)).norm_inf()
            mq = assemble_Mq(n - 1, h, special_beta(h, eps))
            gap_m = (mq - (h / 12) * TridiagonalMatrix.from_stencil(n - 1, -1, 8, 5)).norm_inf()
            rows.append([n, ratio, gap_c, gap_m / h, gap_m / eps])
    text = "# Distance to the limit matrices\n\n" + markdown_table(
        ["n", "eps/h", "|C^e - C^0|_inf", "|M^q - M^q0|_inf / h", "|M^q - M^q0|_inf / eps"], rows)
    (d / "limit_matrices.md").write_text(text)
    print(text)
    print("max |gap/eps - 1| =", max(abs(r[4] - 1) for r in rows if r[1] <= 1e-2))
