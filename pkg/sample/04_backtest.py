import sys

from pyqdar import FitOptions, backtest_suite, build_design, load_series, simulate_qdar
from pyqdar.backtest import suite_frame
from pyqdar.tasks import create_frame_table
from rich.console import Console


LEVELS = (0.05, 0.10, 0.90, 0.95)
SEED = 5


def main() -> None:
    console = Console()
    if len(sys.argv) > 1:
        series = load_series(sys.argv[1])
    else:
        series = simulate_qdar(build_design("dar-const", "t5"), 1000, seed=SEED)

    reports = []
    for fix_beta_zero in (False, True):
        opts = FitOptions(seed=SEED, n_starts=4, fix_beta_zero=fix_beta_zero)
        reports += backtest_suite(series, LEVELS, p=1, opts=opts, workers=4)

    console.print(create_frame_table(suite_frame(reports), "VaR backtest (CC, DQ are p-values)"))


if __name__ == "__main__":
    main()
