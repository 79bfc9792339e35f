"""How colluder knowledge grows when values keep changing.

Each neighbour's value is versioned: an update bumps the version the
next summation will see, repeated updates coalesce, and versions count
from the first time an observer actually sums the neighbour.  The
recorded system therefore grows columns as the network evolves — and
old versions can still leak long after they were replaced.
"""

from sumrecon import (
    AdversarialKnowledge,
    Graph,
    RationalMatrix,
    adversary_view,
    dedup_rows,
    merge_columns,
    partial_solutions,
)


def compact(matrix):
    keep = [
        j for j in range(matrix.cols) if any(matrix[i, j] for i in range(matrix.rows))
    ]
    return [[int(matrix[i, j]) for j in keep] for i in range(matrix.rows)]


def show(label, matrix):
    print(label)
    for row in compact(matrix):
        print("   ", row)


def main():
    hexagon = Graph(6, [(0, 3), (0, 4), (1, 3), (1, 5), (2, 4), (2, 5)])
    know = AdversarialKnowledge(adversary_view(hexagon, {0, 1, 2}))

    know.record_summation(0)
    know.record_summation(1)
    show("after two summations (columns = neighbour versions):", know.to_matrix())

    know.record_update(0)
    know.record_summation(0)
    show("\nneighbour 0 changed value, observer 0 re-sums:", know.to_matrix())

    know.record_update(0)
    know.record_update(1)
    know.record_summation(0)
    show("\ntwo more changes, another summation:", know.to_matrix())

    print("\n=== Collapsing versions that never changed ===")
    print("five summations over four neighbours, versioned columns:")
    raw = [[0] * 20 for _ in range(5)]
    for i, cols in enumerate([(0, 10), (0, 5), (5, 10), (5, 11), (0, 15)]):
        for c in cols:
            raw[i][c] = 1
    wide = RationalMatrix(raw)
    merged = merge_columns(wide, 4, 5)
    show("merged down to one column per neighbour:", merged)

    witness = (1, 1, -1, 0, 0)
    slim, pooled = dedup_rows(merged, witness)
    print(f"\npooling duplicate rows under combination {witness}:")
    for i in range(slim.rows):
        row = [int(slim[i, j]) for j in range(slim.cols)]
        print(f"    {str(pooled[i]):>2} x {row}")
    leak = [
        sum(pooled[i] * slim[i, j] for i in range(slim.rows))
        for j in range(slim.cols)
    ]
    print(f"weighted row sum = {[int(x) for x in leak]}  ->  "
          "twice the first neighbour's value")

    print("\nsolver view of the merged system:")
    for sol in partial_solutions(merged):
        print(f"    value {sol.variable_index} recoverable")


if __name__ == "__main__":
    main()
