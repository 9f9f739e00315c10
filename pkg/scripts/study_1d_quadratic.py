"""1D convergence with the special quadratic bubble, eps = h^2, for f = 1 and f = e^x."""
from _common import out_dir, save_study

from bubble_upg.study import StudySpec, run_study

if __name__ == "__main__":
    d = out_dir(__doc__)
    ns = tuple(2**k for k in range(4, 12))
    for problem in ("f1", "ex"):
        spec = StudySpec(problem, ns, epsilon_policy="h2", deltas=("h", 0.01))
        save_study(run_study(spec), d, f"study_1d_{problem}", f"1D {problem}, special quadratic bubble, eps = h^2")
