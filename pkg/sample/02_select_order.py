from pyqdar import build_design, select_order, simulate_qdar
from pyqdar.tasks import create_frame_table
from rich.console import Console


N = 1000
P_MAX = 4
K = 9
SEED = 3


def main() -> None:
    console = Console()
    series = simulate_qdar(build_design("order2-const", "t3"), N, seed=SEED)
    table = select_order(series, K=K, p_max=P_MAX, workers=4)
    console.print(create_frame_table(table.to_frame(), f"Combined BIC (chosen p = {table.chosen})"))


if __name__ == "__main__":
    main()
