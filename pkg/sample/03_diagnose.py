from pyqdar import (
    FitOptions,
    build_design,
    fit,
    portmanteau,
    print_json_message,
    qacf,
    qacf_confidence_bands,
    simulate_qdar,
)


N = 1000
TAU = 0.25
K = 6
SEED = 11


def main() -> None:
    # c2 > 0: the order-1 fit misses the lag-2 scale term
    series = simulate_qdar(build_design("misspec", c1=0.0, c2=0.5), N, seed=SEED)
    result = fit(series, TAU, 1, opts=FitOptions(seed=SEED))

    report = qacf(series, result, K)
    print(qacf_confidence_bands(report).to_string(index=False))

    test = portmanteau(report, B=10000, seed=SEED, workers=4)
    print_json_message("Portmanteau tests", test.to_dict(), "cyan")


if __name__ == "__main__":
    main()
