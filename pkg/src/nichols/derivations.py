"""Quantum differential operators and braided adjoints on a computed truncation.

Elements are (degree, coords) pairs over the graded basis of a
GradedNicholsState, the same convention GradedNicholsState.multiply uses.

Convolution order: the dual pairing reverses tensor slots, so iterating left
derivations f applied first, then g, extracts against g (x) f. Concretely,
applying partial_left along dual indices j_1, ..., j_n (j_1 innermost) to a
degree-n element reads off the coefficient of the tensor word (j_1, ..., j_n)
in its symmetrized lift.
"""

from .errors import DegreeRangeError, ScenarioError


def element_is_zero(x) -> bool:
    return all(v.is_zero() for v in x[1].values())


def add_elements(x, y):
    if x[0] != y[0] and x[1] and y[1]:
        raise DegreeRangeError("cannot add elements of different degrees",
                               degrees=[x[0], y[0]])
    out = dict(x[1])
    for k, v in y[1].items():
        cur = out.get(k)
        out[k] = v if cur is None else cur + v
    return (x[0] if x[1] else y[0],
            {k: v for k, v in out.items() if not v.is_zero()})


def scale_element(s, x):
    return (x[0], {k: s * v for k, v in x[1].items()} if not s.is_zero()
            else {})


def partial_right(state, k: int, x):
    """Right derivation by the k-th dual basis vector."""
    n, coords = x
    if n > state.max_degree():
        raise DegreeRangeError("element degree beyond the computed range",
                               degree=n, computed=state.max_degree())
    if n == 0:
        return (0, {})
    return (n - 1, state.derivative(n, coords, k))


def _left_on_word(state, n, m, j):
    """Coords of the left derivation by f_j of the m-th degree-n basis word."""
    memo = getattr(state, "_left_memo", None)
    if memo is None:
        memo = state._left_memo = {}
    key = (n, m, j)
    cached = memo.get(key)
    if cached is not None:
        return cached
    field = state.field
    word = state.words[n][m]
    i = word[0]
    if n == 1:
        out = {0: field.one()} if j == i else {}
        memo[key] = out
        return out
    tidx = state.word_index[n - 1][word[1:]]
    out = {tidx: field.one()} if j == i else {}
    # twisted term: v_i times the derivation by g_i^{-1} . f_j on the tail
    row = state.module.action_of(state.module.coaction[i]).entries[j]
    prods = state.products[n - 1]
    for b, rb in enumerate(row):
        if rb.is_zero():
            continue
        for m2, c2 in _left_on_word(state, n - 1, tidx, b).items():
            s = rb * c2
            for idx, p in prods[i, m2].items():
                term = s * p
                cur = out.get(idx)
                out[idx] = term if cur is None else cur + term
    out = {k: v for k, v in out.items() if not v.is_zero()}
    memo[key] = out
    return out


def partial_left(state, j: int, x):
    """Left derivation by the j-th dual basis vector."""
    n, coords = x
    if n > state.max_degree():
        raise DegreeRangeError("element degree beyond the computed range",
                               degree=n, computed=state.max_degree())
    if n == 0:
        return (0, {})
    out = {}
    for m, c in coords.items():
        for idx, s in _left_on_word(state, n, m, j).items():
            term = c * s
            cur = out.get(idx)
            out[idx] = term if cur is None else cur + term
    return (n - 1, {k: v for k, v in out.items() if not v.is_zero()})


class DerivationOperator:
    """A one-sided derivation by a dual functional, applied by linearity.

    functional is a dual basis index or a {index: scalar} combination.
    """

    def __init__(self, state, side: str, functional):
        if side not in ("left", "right"):
            raise ScenarioError("derivation side must be left or right",
                                side=side)
        self.state = state
        self.side = side
        if isinstance(functional, int):
            functional = {functional: state.field.one()}
        self.functional = dict(functional)

    def __call__(self, x):
        apply_one = partial_left if self.side == "left" else partial_right
        out = (max(x[0] - 1, 0), {})
        for j, w in self.functional.items():
            out = add_elements(out, scale_element(w, apply_one(self.state, j, x)))
        return out


def _as_degree_one(state, v):
    if isinstance(v, int):
        return {v: state.field.one()}
    deg, coords = v
    if deg != 1 and coords:
        raise DegreeRangeError("adjoint argument must have degree one",
                               degree=deg)
    return coords


def ad_c(state, v, y):
    """Braided adjoint of a degree-one element: ad_c v(y) = vy - (g.y)v."""
    vc = _as_degree_one(state, v)
    n, yc = y
    out = (n + 1, {})
    for i, si in vc.items():
        xi = (1, {i: state.field.one()})
        t1 = state.multiply(xi, y)
        acols = state.action_columns(n, state.module.coaction[i])
        acted = {}
        for m, c in yc.items():
            for idx, s in acols[m].items():
                term = c * s
                cur = acted.get(idx)
                acted[idx] = term if cur is None else cur + term
        t2 = state.multiply((n, acted), xi)
        out = add_elements(out, scale_element(si, add_elements(
            t1, scale_element(-state.field.one(), t2))))
    return out


def ad_c_inv(state, v, y):
    """Adjoint for the inverse braiding: v y_m - y_m (h_m^{-1} . v) per word."""
    vc = _as_degree_one(state, v)
    n, yc = y
    group = state.module.group
    out = (n + 1, {})
    minus = -state.field.one()
    for i, si in vc.items():
        xi = (1, {i: state.field.one()})
        out = add_elements(out, scale_element(si, state.multiply(xi, y)))
        for m, cm in yc.items():
            hinv = group.inv(state.hdegrees[n][m])
            for a, s in state.module.action_column(hinv, i):
                t = state.multiply((n, {m: cm * s}), (1, {a: state.field.one()}))
                out = add_elements(out, scale_element(minus * si, t))
    return out


def nondegeneracy_witness(state, x):
    """Lex-least dual-index word whose iterated left derivation of x is a
    nonzero scalar; None only if x is zero."""
    n = x[0]
    if element_is_zero(x):
        return None
    if n == 0:
        return ()
    for j in range(state.module.dim):
        y = partial_left(state, j, x)
        if not element_is_zero(y):
            rest = nondegeneracy_witness(state, y)
            return (j,) + rest
    raise ScenarioError("nonzero element with all left derivations zero",
                        degree=n)


# -- tiny s-expression surface for regression scripts


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse(tokens, pos):
    if pos >= len(tokens):
        raise ScenarioError("unexpected end of expression")
    tok = tokens[pos]
    if tok == ")":
        raise ScenarioError("unexpected closing parenthesis", position=pos)
    if tok != "(":
        return tok, pos + 1
    items = []
    pos += 1
    while pos < len(tokens) and tokens[pos] != ")":
        node, pos = _parse(tokens, pos)
        items.append(node)
    if pos >= len(tokens):
        raise ScenarioError("unbalanced parentheses")
    return items, pos + 1


def _label_index(state, name):
    idx = state.module.label_index.get(name)
    if idx is None:
        raise ScenarioError("unknown basis label", label=name,
                            labels=state.module.basis_labels)
    return idx


def _eval(state, node):
    if isinstance(node, str):
        if node == "1":
            return (0, {0: state.field.one()})
        return (1, {_label_index(state, node): state.field.one()})
    if len(node) != 3 or not isinstance(node[0], str):
        raise ScenarioError("expected (op label expr)", got=node)
    op, arg, inner = node
    x = _eval(state, inner)
    if op in ("d", "dl"):
        idx = _label_index(state, arg)
        apply_one = partial_right if op == "d" else partial_left
        return apply_one(state, idx, x)
    if op in ("ad", "adinv"):
        idx = _label_index(state, arg)
        apply_ad = ad_c if op == "ad" else ad_c_inv
        return apply_ad(state, idx, x)
    raise ScenarioError("unknown operator", operator=op,
                        expected=["d", "dl", "ad", "adinv"])


def evaluate_expr(state, text: str):
    """Evaluate a derivation expression like (d x3 (d y1 (ad x2 (ad x1 y2)))).

    d / dl are right / left derivations by the dual of the named basis vector;
    ad / adinv are the braided adjoints; the atom 1 is the unit.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ScenarioError("empty expression")
    node, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise ScenarioError("trailing tokens after expression",
                            trailing=tokens[pos:])
    return _eval(state, node)


def format_element(state, x) -> str:
    """Human-readable normal form, like '-x2*x3 + (z3^1)*x1*x1'."""
    n, coords = x
    terms = []
    for m in sorted(coords):
        v = coords[m]
        if v.is_zero():
            continue
        word = state.words[n][m]
        label = "*".join(state.module.basis_labels[i] for i in word) if word \
            else "1"
        s = str(v)
        if s == "1":
            terms.append(label)
        elif s == "-1":
            terms.append("-" + label)
        else:
            terms.append(f"({s})*{label}")
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out
