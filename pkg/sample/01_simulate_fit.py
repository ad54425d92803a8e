from pyqdar import (
    FitOptions,
    build_design,
    fit,
    print_json_message,
    simulate_qdar,
    stationarity_bound,
)


DESIGN = "dar-const"
N = 1000
TAU = 0.25
SEED = 7


def main() -> None:
    coefs = build_design(DESIGN)
    verdict = stationarity_bound(coefs, kappa=0.5, seed=SEED)
    print(f"E|φ + sign(Z)√β|^0.5 = {verdict.bound:.4f} (stationary: {verdict.stationary})")

    series = simulate_qdar(coefs, N, seed=SEED)
    result = fit(series, TAU, 1, opts=FitOptions(seed=SEED))

    truth = coefs.theta_at(TAU)
    print_json_message("True parameters", truth.to_dict(), "yellow")
    print_json_message("Self-weighted estimate", result.to_dict(), "green")


if __name__ == "__main__":
    main()
