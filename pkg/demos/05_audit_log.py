"""Auditing a summation log for privacy leaks.

A plain-text log lists value updates and observed summations; the
analyser replays it under the versioning rules and reports every
private value the log pins down, with the row combination that exposes
it — and the exact value whenever totals were recorded.
"""

from pathlib import Path

from sumrecon import analyse_audit_file

RING_LOG = """\
# three observers around a ring, totals recorded
sum 0 0:0 1:0 = 7
sum 1 0:0 2:0 = 13
sum 2 1:0 2:0 = 8
"""

NO_TOTALS_LOG = """\
# the same ring, totals withheld
sum 0 0:0 1:0
sum 1 0:0 2:0
sum 2 1:0 2:0
"""

EVOLVING_LOG = """\
# neighbour 0 changes value between two otherwise identical summations
sum 0 0:0 1:0
update 0
sum 0 0:1 1:0
"""


def main():
    out = Path("demo_output")
    out.mkdir(exist_ok=True)

    ring_path = out / "ring.log"
    ring_path.write_text(RING_LOG, encoding="utf-8")
    result = analyse_audit_file(ring_path)
    print(f"=== {ring_path} ===")
    print(f"{result.summation_count} summations over neighbours "
          f"{list(result.neighbour_ids)}; {result.leak_count} leaks")
    for leak in result.leaks:
        combo = ", ".join(str(c) for c in leak.coefficients)
        print(f"    neighbour {leak.neighbour} version {leak.version} "
              f"= {leak.value}  [combination: {combo}]")

    no_totals_path = out / "no_totals.log"
    no_totals_path.write_text(NO_TOTALS_LOG, encoding="utf-8")
    result = analyse_audit_file(no_totals_path)
    print(f"\n=== {no_totals_path} ===")
    print(f"{result.summation_count} summations; {result.leak_count} leaks")
    for leak in result.leaks:
        shown = leak.value if leak.value is not None else "unknown (no totals)"
        print(f"    neighbour {leak.neighbour} version {leak.version} = {shown}")
    print("the exposure is structural: totals only fill in the numbers")

    evolving_path = out / "evolving.log"
    evolving_path.write_text(EVOLVING_LOG, encoding="utf-8")
    result = analyse_audit_file(evolving_path)
    print(f"\n=== {evolving_path} ===")
    print(f"{result.summation_count} summations; {result.leak_count} leaks")
    print("subtracting the two summations leaves a difference of two")
    print("versions of the same neighbour — one equation, two unknowns.")
    print("an un-versioned reading of this log would report a false leak")


if __name__ == "__main__":
    main()
