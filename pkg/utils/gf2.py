"""Small GF(2) linear algebra helpers on int bitsets (bit i = coordinate i)."""


def parity(x):
    return x.bit_count() & 1


def evaluate(form, vector):
    """Value of the linear form `form` at `vector`: parity of popcount(form & vector)."""
    return parity(form & vector)


def gf2_rank(rows, n_cols):
    """Compute rank over GF(2) via Gaussian elimination."""
    work = rows[:]
    rank = 0
    row_idx = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row_idx, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and ((work[r] >> col) & 1):
                work[r] ^= work[row_idx]
        rank += 1
        row_idx += 1
        if row_idx == len(work):
            break
    return rank


def independent_subset(vectors):
    """Indices of a greedily chosen basis of span(vectors), in input order."""
    pivots = {}  # pivot bit -> reduced vector
    chosen = []
    for idx, vec in enumerate(vectors):
        v = vec
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                chosen.append(idx)
                break
            v ^= pivots[top]
    return chosen


def express(vec, basis):
    """
    Coefficients lambda (bit i -> basis[i]) with XOR of the selected basis
    vectors equal to vec, or None when vec is outside the span.
    """
    pivots = {}  # pivot bit -> (reduced vector, combination mask)
    for i, b in enumerate(basis):
        v, combo = b, 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = (v, combo)
                break
            pv, pc = pivots[top]
            v ^= pv
            combo ^= pc
    v, combo = vec, 0
    while v:
        top = v.bit_length() - 1
        if top not in pivots:
            return None
        pv, pc = pivots[top]
        v ^= pv
        combo ^= pc
    return combo


def gf2_solve(rows, rhs, n_cols):
    """
    One solution u (bitmask over n_cols) of  parity(rows[j] & u) = rhs[j]
    for every j, or None if the system is inconsistent. Free variables are 0.
    """
    aug = [row | ((bit & 1) << n_cols) for row, bit in zip(rows, rhs)]
    pivot_cols = []
    row_idx = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row_idx, len(aug)):
            if (aug[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        aug[row_idx], aug[pivot] = aug[pivot], aug[row_idx]
        for r in range(len(aug)):
            if r != row_idx and ((aug[r] >> col) & 1):
                aug[r] ^= aug[row_idx]
        pivot_cols.append(col)
        row_idx += 1
    # a zero row with rhs 1 means no solution
    for r in range(row_idx, len(aug)):
        if (aug[r] >> n_cols) & 1:
            return None
    solution = 0
    for r, col in enumerate(pivot_cols):
        if (aug[r] >> n_cols) & 1:
            solution |= 1 << col
    return solution


def to_bits(vector, dim):
    """Render with coordinate 0 first, e.g. to_bits(1, 3) == '100'."""
    return ''.join(str((vector >> i) & 1) for i in range(dim))


def from_bits(text):
    """Inverse of to_bits."""
    value = 0
    for i, ch in enumerate(text.strip()):
        if ch not in '01':
            raise ValueError(f"not a bit string: {text!r}")
        if ch == '1':
            value |= 1 << i
    return value


def invertible_matrices(dim):
    """
    Every invertible dim x dim matrix over GF(2), as a tuple of column
    bitmasks (column i = image of basis vector i). 168 for dim 3.
    """
    columns = [0] * dim

    def extend(i, span):
        if i == dim:
            yield tuple(columns)
            return
        for col in range(1, 1 << dim):
            if col in span:
                continue
            columns[i] = col
            yield from extend(i + 1, span | {s ^ col for s in span})

    yield from extend(0, {0})


def apply_matrix(columns, vector):
    """Matrix-vector product with the matrix given by its columns."""
    out = 0
    i = 0
    while vector:
        if vector & 1:
            out ^= columns[i]
        vector >>= 1
        i += 1
    return out


def dual_action(columns, form, dim):
    """
    The form c o A^{-1}: the form whose value at A u equals c(u).
    Computed as the unique form f with f(columns[i]) = c(e_i) for each i.
    """
    rhs = [(form >> i) & 1 for i in range(dim)]
    solved = gf2_solve(list(columns), rhs, dim)
    return solved


__all__ = [
    "parity", "evaluate", "gf2_rank", "independent_subset", "express",
    "gf2_solve", "to_bits", "from_bits", "invertible_matrices",
    "apply_matrix", "dual_action",
]
