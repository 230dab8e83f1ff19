"""Run the full verification suite and print a compact residual table.

Equivalent to `currentlab check all`, but shows how to drive the runner from
Python and how to read the reports programmatically.

Run:  python3 demos/run_checks.py
"""

from currentlab.suites import RunConfig, run_suite, suite_specs, SUITE_NAMES


def main() -> None:
    cfg = RunConfig(seed=2024, workers=4)
    reports = run_suite(cfg, "all")
    width = max(len(r.check_id) for r in reports)
    print(f"{'check':<{width}}  {'residual':>12}  {'tolerance':>9}  result")
    for r in reports:
        print(f"{r.check_id:<{width}}  {r.residual:12.3e}  {r.tolerance:9.0e}  "
              f"{'pass' if r.passed else 'FAIL'}")
    n_fail = sum(not r.passed for r in reports)
    print(f"\n{len(reports)} checks, {n_fail} failures "
          f"(suites: {', '.join(n for n in SUITE_NAMES if n != 'all')})")


if __name__ == "__main__":
    main()
