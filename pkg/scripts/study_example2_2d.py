"""2D Example 2 (parabolic layers at y = 0 and y = 1), eps = (1/64)^2.

Runs the literal 40 sqrt(eps) strip (its subdomain is empty at this eps) and
then narrower strips where the interior error can actually be measured.
"""
import math

from _common import out_dir, save_study

from bubble_upg.study import StudySpec, run_study

if __name__ == "__main__":
    d = out_dir(__doc__)
    eps = (1 / 64) ** 2
    for width in (40, 16, 8, 4):
        spec = StudySpec("example2", (16, 32, 64, 128, 256), epsilon=eps, y_strip=width * math.sqrt(eps))
        save_study(run_study(spec), d, f"study_example2_strip{width}",
                   f"2D Example 2, eps = 1/4096, strip {width} sqrt(eps)")
