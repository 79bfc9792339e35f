"""Recovering private values from sums alone.

Three colluding observers sit on a six-cycle, each summing the two
private values it can reach.  No single total reveals anything, but the
three totals together form a full-rank linear system: half the sum of
all totals minus any one total isolates one hidden value exactly.
"""

from fractions import Fraction

from sumrecon import (
    AdversarialKnowledge,
    Graph,
    RationalMatrix,
    adversary_view,
    partial_solutions,
)


def main():
    print("=== The three-observer ring ===")
    system = RationalMatrix([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    print("observed summation rows (one column per hidden value):")
    for i in range(system.rows):
        print("   ", [int(system[i, j]) for j in range(system.cols)])

    print("\nevery hidden value is forced:")
    for sol in partial_solutions(system):
        combo = ", ".join(str(c) for c in sol.coefficients)
        print(f"    value {sol.variable_index}: row combination ({combo})")

    print("\n=== Replayed through the knowledge ledger, with totals ===")
    hexagon = Graph(6, [(0, 3), (0, 4), (1, 3), (1, 5), (2, 4), (2, 5)])
    know = AdversarialKnowledge(adversary_view(hexagon, {0, 1, 2}))
    for observer, total in ((0, 7), (1, 13), (2, 8)):
        know.record_summation(observer, Fraction(total))
        print(f"    observer {observer} reports total {total}")
    print("recovered private values:")
    for rec in know.reconstruct():
        print(f"    neighbour {rec.neighbour}: {rec.value}")

    print("\n=== Nested summations leak by subtraction ===")
    star = Graph(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3)])
    know = AdversarialKnowledge(adversary_view(star, {0, 1}))
    know.record_summation(0, Fraction(10))
    know.record_summation(1, Fraction(4))
    print("observer 0 sums three values (10); observer 1 sums two of them (4)")
    for rec in know.reconstruct():
        print(f"    exposed: neighbour {rec.neighbour} = {rec.value}")


if __name__ == "__main__":
    main()
