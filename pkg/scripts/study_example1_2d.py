"""2D Example 1 (exponential layer at x = 1) convergence study at eps = 1e-8."""
from _common import out_dir, save_study

from bubble_upg.study import StudySpec, run_study

if __name__ == "__main__":
    d = out_dir(__doc__)
    spec = StudySpec("example1", (8, 16, 32, 64, 128, 256), epsilon=1e-8, deltas=(0.01, "h"))
    save_study(run_study(spec), d, "study_example1", "2D Example 1, eps = 1e-8")
