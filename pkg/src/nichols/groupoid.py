"""Reflection theory for families of irreducible Yetter-Drinfeld modules.

The braided adjoint of one block acting on another generates a chain of
subspaces inside the Nichols algebra of the pair; the step at which the
chain vanishes yields a Cartan entry, and the last nonzero step is itself
an irreducible module.  Replacing block i by its dual and every other
block by that top chain module is a reflection.  Reflections generate a
groupoid, explored breadth-first over isomorphism fingerprints; real
roots, standardness of the Cartan matrices, and finite-type recognition
of the resulting Dynkin diagrams are all derived from the explored graph.

A Cartan entry that stays nonzero through the configured degree cap is
reported as UnboundedAtCap, never as a number: reflections along such a
row are refused rather than guessed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .derivations import ad_c
from .engine import DEFAULT_MEM_LIMIT, GradedNicholsState
from .errors import MemoryGuardError, ModuleSpecError, ReflectionError, ScenarioError
from .linalg import IncrementalSpan, Matrix
from .ydmodule import YDModule, direct_sum, fingerprint

DEFAULT_DEGREE_CAP = 8
DEFAULT_NODE_LIMIT = 64
DEFAULT_STATE_LIMIT = 20000


class UnboundedAtCap:
    """Cartan entry whose adjoint chain was still nonzero at the degree cap.

    reached is the largest chain degree certified nonzero, so the entry is
    known to satisfy a <= 1 - reached without being determined.
    """

    __slots__ = ("cap", "reached")

    def __init__(self, cap: int, reached: int):
        self.cap = cap
        self.reached = reached

    def __eq__(self, other):
        return (isinstance(other, UnboundedAtCap)
                and self.cap == other.cap and self.reached == other.reached)

    def __hash__(self):
        return hash(("unbounded", self.cap, self.reached))

    def __repr__(self):
        return f"UnboundedAtCap(cap={self.cap}, reached={self.reached})"

    def to_jsonable(self):
        return {"unbounded_at_cap": self.cap, "chain_reached": self.reached}


def _same_group(a, b) -> bool:
    return a is b or (a.backend == b.backend and a.elements == b.elements
                      and a.generators == b.generators)


def _renamed(block: YDModule, name: str) -> YDModule:
    """Copy of a one-block module with fresh labels, for collision-free sums."""
    labels = [f"{name}{k + 1}" for k in range(block.dim)]
    return YDModule(block.group, block.field, block.coaction, block.action_of,
                    labels, block.triples, [(name, 0, block.dim)], check=False)


class FamilyM:
    """Ordered family of irreducible one-block modules over one group.

    Fingerprints are computed on construction, which also certifies the
    irreducibility of every block.
    """

    def __init__(self, blocks):
        blocks = list(blocks)
        if not blocks:
            raise ModuleSpecError("a family needs at least one block")
        for b in blocks:
            if b.theta != 1 or b.dim == 0:
                raise ModuleSpecError(
                    "family blocks must be nonzero single-summand modules")
        group, fld = blocks[0].group, blocks[0].field
        for b in blocks[1:]:
            if not _same_group(b.group, group):
                raise ModuleSpecError("family blocks must share one group")
            if b.field is not fld:
                raise ModuleSpecError("family blocks must share one scalar field")
        self.blocks = blocks
        self.theta = len(blocks)
        self.group = group
        self.field = fld
        self.fingerprints = tuple(fingerprint(b)[0] for b in blocks)
        self._chains = {}
        self._assembled = None

    def assembled(self) -> YDModule:
        """Direct sum of all blocks, relabeled so block j has multidegree
        alpha_j."""
        if self._assembled is None:
            self._assembled = direct_sum(
                [_renamed(b, f"m{j + 1}_") for j, b in enumerate(self.blocks)])
        return self._assembled

    def __repr__(self):
        dims = ",".join(str(b.dim) for b in self.blocks)
        return f"FamilyM(theta={self.theta}, dims=[{dims}])"


class _Chain(NamedTuple):
    entry: object          # int or UnboundedAtCap
    state: GradedNicholsState
    degree: int            # degree of the last nonzero chain step
    rows: list             # echelon basis of that step, as coord dicts


def _check_indices(fam: FamilyM, i: int, j: int):
    if not (0 <= i < fam.theta and 0 <= j < fam.theta):
        raise ScenarioError("block index out of range", i=i, j=j,
                            theta=fam.theta)
    if i == j:
        raise ScenarioError("the adjoint chain needs two distinct blocks",
                            index=i)


def _adjoint_chain(fam: FamilyM, i: int, j: int, cap: int,
                   mem_limit: int) -> _Chain:
    """Iterate the braided adjoint of block i on block j inside the pair
    algebra until a step vanishes or the degree cap blocks certification."""
    _check_indices(fam, i, j)
    if cap < 1:
        raise ScenarioError("degree cap must be at least 1", cap=cap)
    key = (i, j, cap, mem_limit)
    cached = fam._chains.get(key)
    if cached is not None:
        return cached
    pair = direct_sum([_renamed(fam.blocks[i], "u"),
                       _renamed(fam.blocks[j], "w")])
    state = GradedNicholsState(pair, mem_limit=mem_limit)
    state.extend_to(1)
    di = fam.blocks[i].dim
    dj = fam.blocks[j].dim
    ops = state.ops
    one = state.field.one()
    rows = [{di + k: one} for k in range(dj)]
    m = 1
    while True:
        if m + 1 > cap:
            chain = _Chain(UnboundedAtCap(cap, m), state, m, rows)
            break
        if not state.finished and state.max_degree() < m + 1:
            state.extend_degree()
        images = []
        for v in range(di):
            for row in rows:
                _, coords = ad_c(state, v, (m, row))
                if coords:
                    images.append(coords)
        if not images:
            chain = _Chain(1 - m, state, m, rows)
            break
        slots = sorted({w for coords in images for w in coords})
        colpos = {w: c for c, w in enumerate(slots)}
        span = IncrementalSpan(ops, len(slots), track=False)
        for coords in images:
            vec = [ops.zero] * len(slots)
            for w, val in coords.items():
                vec[colpos[w]] = ops.lift(val)
            span.insert(vec)
        rows = [{slots[c]: ops.lower(rv) for c, rv in enumerate(row)
                 if ops.nonzero(rv)} for row in span.rows]
        m += 1
    fam._chains[key] = chain
    return chain


def cartan_entry(fam: FamilyM, i: int, j: int, cap: int = DEFAULT_DEGREE_CAP,
                 mem_limit: int = DEFAULT_MEM_LIMIT):
    """Cartan entry a_ij as an integer <= 0, or UnboundedAtCap."""
    return _adjoint_chain(fam, i, j, cap, mem_limit).entry


class CartanData:
    """Cartan matrix of a family; off-diagonal entries may be UnboundedAtCap."""

    def __init__(self, entries, cap: int):
        self.entries = [list(row) for row in entries]
        self.theta = len(self.entries)
        self.cap = cap
        for row in self.entries:
            if len(row) != self.theta:
                raise ScenarioError("Cartan matrix must be square")
        for i in range(self.theta):
            for j in range(self.theta):
                v = self.entries[i][j]
                if i == j:
                    if v != 2:
                        raise RuntimeError("Cartan diagonal must equal 2")
                elif isinstance(v, int):
                    if v > 0:
                        raise RuntimeError("off-diagonal Cartan entry above zero")
                elif not isinstance(v, UnboundedAtCap):
                    raise ScenarioError("Cartan entries must be integers or "
                                        "UnboundedAtCap", got=repr(v))
        for i in range(self.theta):
            for j in range(i + 1, self.theta):
                a, b = self.entries[i][j], self.entries[j][i]
                if isinstance(a, int) and isinstance(b, int):
                    if (a == 0) != (b == 0):
                        raise RuntimeError(
                            "zero Cartan entries must come in symmetric pairs")

    def row_exact(self, i: int) -> bool:
        return all(isinstance(v, int) for v in self.entries[i])

    def is_exact(self) -> bool:
        return all(self.row_exact(i) for i in range(self.theta))

    def __eq__(self, other):
        return isinstance(other, CartanData) and self.entries == other.entries

    def __repr__(self):
        return f"CartanData({self.entries})"

    def to_jsonable(self):
        return [[v if isinstance(v, int) else v.to_jsonable() for v in row]
                for row in self.entries]


def cartan_matrix(fam: FamilyM, cap: int = DEFAULT_DEGREE_CAP,
                  mem_limit: int = DEFAULT_MEM_LIMIT) -> CartanData:
    entries = [[2 if i == j else cartan_entry(fam, i, j, cap, mem_limit)
                for j in range(fam.theta)] for i in range(fam.theta)]
    return CartanData(entries, cap)


def l_j_max(fam: FamilyM, i: int, j: int, cap: int = DEFAULT_DEGREE_CAP,
            mem_limit: int = DEFAULT_MEM_LIMIT, name: str = "u") -> YDModule:
    """The top nonzero adjoint chain step as a standalone module.

    Inside the reflected family this block sits at position j with
    multidegree alpha_j - a_ij alpha_i; irreducibility is certified by the
    fingerprint machinery before returning.
    """
    chain = _adjoint_chain(fam, i, j, cap, mem_limit)
    if not isinstance(chain.entry, int):
        raise ReflectionError(
            "Cartan entry not certified finite within the degree cap",
            i=i, j=j, cap=cap, chain_reached=chain.entry.reached)
    state, n, rows = chain.state, chain.degree, chain.rows
    want_mdeg = (n - 1, 1)
    coaction = []
    for row in rows:
        hdegs = {state.hdegrees[n][w] for w in row}
        mdegs = {state.mdegrees[n][w] for w in row}
        if len(hdegs) != 1 or mdegs != {want_mdeg}:
            raise RuntimeError("adjoint chain rows are not homogeneous")
        coaction.append(hdegs.pop())
    slots = sorted({w for row in rows for w in row})
    colpos = {w: c for c, w in enumerate(slots)}
    ops = state.ops
    solver = IncrementalSpan(ops, len(slots), track=True)
    for row in rows:
        vec = [ops.zero] * len(slots)
        for w, val in row.items():
            vec[colpos[w]] = ops.lift(val)
        kind, _ = solver.insert(vec)
        if kind != "pivot":
            raise RuntimeError("adjoint chain basis is not independent")
    fld = state.field
    dim = len(rows)

    def act(t):
        cols = state.action_columns(n, t)
        columns = []
        for row in rows:
            acc = {}
            for w, cv in row.items():
                for w2, s in cols[w].items():
                    term = cv * s
                    cur = acc.get(w2)
                    acc[w2] = term if cur is None else cur + term
            vec = [ops.zero] * len(slots)
            for w2, val in acc.items():
                if val.is_zero():
                    continue
                c = colpos.get(w2)
                if c is None:
                    raise RuntimeError("group action left the adjoint chain span")
                vec[c] = ops.lift(val)
            kind, data = solver.insert(vec)
            if kind != "combo":
                raise RuntimeError("group action left the adjoint chain span")
            columns.append([ops.lower(cf) for cf in data])
        return Matrix(fld, [[columns[c][r] for c in range(dim)]
                            for r in range(dim)])

    labels = [f"{name}{k + 1}" for k in range(dim)]
    triples = [(0, k, 0) for k in range(dim)]
    out = YDModule(state.module.group, fld, coaction, act, labels, triples,
                   [(name, 0, dim)], check=True)
    try:
        fingerprint(out)
    except ModuleSpecError as exc:
        raise RuntimeError(
            "top adjoint chain step failed the irreducibility check; "
            "this indicates a bug") from exc
    return out


def _cartan_row(fam: FamilyM, i: int, cap: int, mem_limit: int):
    row = [2 if j == i else cartan_entry(fam, i, j, cap, mem_limit)
           for j in range(fam.theta)]
    bad = [j for j, v in enumerate(row) if isinstance(v, UnboundedAtCap)]
    if bad:
        raise ReflectionError(
            "reflection row is not certified finite within the degree cap",
            index=i, uncertified=bad, cap=cap)
    return row


def reflect(fam: FamilyM, i: int, cap: int = DEFAULT_DEGREE_CAP,
            mem_limit: int = DEFAULT_MEM_LIMIT) -> FamilyM:
    """Reflected family: block i dualized, block j the top adjoint module."""
    if not 0 <= i < fam.theta:
        raise ScenarioError("block index out of range", i=i, theta=fam.theta)
    _cartan_row(fam, i, cap, mem_limit)
    blocks = [fam.blocks[i].dual() if j == i else
              l_j_max(fam, i, j, cap, mem_limit, name=f"u{j + 1}_")
              for j in range(fam.theta)]
    return FamilyM(blocks)


def _s_from_row(row, i: int):
    theta = len(row)
    return tuple(tuple((1 if k == j else 0) - (row[j] if k == i else 0)
                       for j in range(theta)) for k in range(theta))


def s_matrix(fam: FamilyM, i: int, cap: int = DEFAULT_DEGREE_CAP,
             mem_limit: int = DEFAULT_MEM_LIMIT):
    """Reflection matrix: alpha_j -> alpha_j - a_ij alpha_i, as row tuples."""
    if not 0 <= i < fam.theta:
        raise ScenarioError("block index out of range", i=i, theta=fam.theta)
    return _s_from_row(_cartan_row(fam, i, cap, mem_limit), i)


@dataclass
class NodeRecord:
    family: FamilyM
    key: tuple
    cartan: CartanData = None


@dataclass
class GroupoidGraph:
    """Explored reflection groupoid, keyed by family fingerprints."""

    base_key: tuple
    nodes: dict = field(default_factory=dict)
    order: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)
    uncertified: dict = field(default_factory=dict)
    cap: int = DEFAULT_DEGREE_CAP
    node_limit: int = DEFAULT_NODE_LIMIT
    partial: bool = False

    def node_ids(self) -> dict:
        return {key: f"n{k}" for k, key in enumerate(self.order)}

    def has_uncertified_rows(self) -> bool:
        return any(self.uncertified.values())

    def to_jsonable(self) -> dict:
        ids = self.node_ids()
        pos = {key: k for k, key in enumerate(self.order)}
        nodes = []
        for key in self.order:
            rec = self.nodes[key]
            nodes.append({
                "id": ids[key],
                "theta": rec.family.theta,
                "block_dims": [b.dim for b in rec.family.blocks],
                "fingerprint": str(key),
                "cartan": rec.cartan.to_jsonable() if rec.cartan else None,
                "uncertified_rows": [i + 1 for i in
                                     sorted(self.uncertified.get(key, []))],
            })
        edges = []
        for (key, i), (key2, s) in sorted(
                self.edges.items(), key=lambda kv: (pos[kv[0][0]], kv[0][1])):
            edges.append({"from": ids[key], "index": i + 1, "to": ids[key2],
                          "s_matrix": [list(r) for r in s]})
        return {"base": ids[self.base_key], "degree_cap": self.cap,
                "node_limit": self.node_limit, "partial": self.partial,
                "nodes": nodes, "edges": edges}

    def to_dot(self) -> str:
        ids = self.node_ids()
        pos = {key: k for k, key in enumerate(self.order)}
        lines = ["graph groupoid {"]
        for key in self.order:
            rec = self.nodes[key]
            if rec.cartan is None:
                cart = "?"
            else:
                cart = str(rec.cartan.to_jsonable()).replace(" ", "")
            bad = sorted(self.uncertified.get(key, []))
            extra = f"\\nuncertified rows {[i + 1 for i in bad]}" if bad else ""
            lines.append(f'  {ids[key]} [label="{ids[key]}\\n{cart}{extra}"];')
        seen = set()
        for (key, i), (key2, _) in sorted(
                self.edges.items(), key=lambda kv: (pos[kv[0][0]], kv[0][1])):
            mark = frozenset((key, key2)), i
            if mark in seen:
                continue
            seen.add(mark)
            lines.append(f'  {ids[key]} -- {ids[key2]} [label="s{i + 1}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def explore_groupoid(fam: FamilyM, cap: int = DEFAULT_DEGREE_CAP,
                     node_limit: int = DEFAULT_NODE_LIMIT,
                     mem_limit: int = DEFAULT_MEM_LIMIT) -> GroupoidGraph:
    """Breadth-first closure of a family under all certified reflections.

    Uncertified rows are recorded, never reflected.  When the node limit
    stops a new family from being added the graph is flagged partial and
    the corresponding edges are omitted.
    """
    graph = GroupoidGraph(base_key=fam.fingerprints, cap=cap,
                          node_limit=node_limit)
    graph.nodes[fam.fingerprints] = NodeRecord(fam, fam.fingerprints)
    graph.order.append(fam.fingerprints)
    queue = deque([fam.fingerprints])
    while queue:
        key = queue.popleft()
        rec = graph.nodes[key]
        rec.cartan = cartan_matrix(rec.family, cap, mem_limit)
        for i in range(rec.family.theta):
            row = rec.cartan.entries[i]
            if not rec.cartan.row_exact(i):
                graph.uncertified.setdefault(key, []).append(i)
                continue
            fam2 = reflect(rec.family, i, cap, mem_limit)
            key2 = fam2.fingerprints
            if key2 not in graph.nodes:
                if len(graph.nodes) >= node_limit:
                    graph.partial = True
                    continue
                graph.nodes[key2] = NodeRecord(fam2, key2)
                graph.order.append(key2)
                queue.append(key2)
            graph.edges[key, i] = (key2, _s_from_row(row, i))
    _check_involution(graph)
    return graph


def _check_involution(graph: GroupoidGraph):
    """Every recorded edge must have a matching reverse with the same matrix."""
    for (key, i), (key2, s) in graph.edges.items():
        back = graph.edges.get((key2, i))
        if back is None:
            raise RuntimeError("missing reverse edge; reflection involution "
                               "failed")
        tgt, s2 = back
        if tgt != key or s2 != s:
            raise RuntimeError("reflection involution failed on an edge pair")


@dataclass(frozen=True)
class RootSet:
    roots: frozenset
    partial: bool

    def sorted_roots(self):
        return sorted(self.roots)


def _mat_identity(theta: int):
    return tuple(tuple(1 if r == c else 0 for c in range(theta))
                 for r in range(theta))


def _mat_mul(a, b):
    theta = len(a)
    return tuple(tuple(sum(a[r][k] * b[k][c] for k in range(theta))
                       for c in range(theta)) for r in range(theta))


def real_roots(graph: GroupoidGraph,
               state_limit: int = DEFAULT_STATE_LIMIT) -> RootSet:
    """All images of the simple roots under composed edge matrices.

    The walk enumerates (node, transport) pairs, so distinct morphisms into
    the base along different paths are all collected.  The set is flagged
    partial when the graph is partial or any row stayed uncertified.
    """
    base = graph.base_key
    theta = graph.nodes[base].family.theta
    start = (base, _mat_identity(theta))
    states = {start}
    queue = deque([start])
    roots = set()
    while queue:
        key, t = queue.popleft()
        for j in range(theta):
            roots.add(tuple(t[r][j] for r in range(theta)))
        for i in range(theta):
            edge = graph.edges.get((key, i))
            if edge is None:
                continue
            key2, s = edge
            nxt = (key2, _mat_mul(t, s))
            if nxt not in states:
                if len(states) >= state_limit:
                    raise MemoryGuardError(
                        "real-root walk exceeded the state budget",
                        limit=state_limit)
                states.add(nxt)
                queue.append(nxt)
    partial = graph.partial or graph.has_uncertified_rows()
    return RootSet(frozenset(roots), partial)


class StandardnessVerdict(NamedTuple):
    status: str            # "standard" | "not-standard" | "undecided"
    witness: object        # None, or a dict naming the differing entry


def is_standard(graph: GroupoidGraph) -> StandardnessVerdict:
    """Whether every explored node repeats the base Cartan matrix exactly."""
    if graph.partial:
        return StandardnessVerdict("undecided", {"reason": "node-limit"})
    if graph.has_uncertified_rows():
        ids = graph.node_ids()
        bad = sorted(ids[k] for k, rows in graph.uncertified.items() if rows)
        return StandardnessVerdict(
            "undecided", {"reason": "uncertified-rows", "nodes": bad})
    ids = graph.node_ids()
    base = graph.nodes[graph.base_key].cartan
    for key in graph.order:
        cd = graph.nodes[key].cartan
        for i in range(cd.theta):
            for j in range(cd.theta):
                if cd.entries[i][j] != base.entries[i][j]:
                    witness = {
                        "node_a": ids[graph.base_key], "node_b": ids[key],
                        "entry": (i + 1, j + 1),
                        "values": (base.entries[i][j], cd.entries[i][j]),
                    }
                    return StandardnessVerdict("not-standard", witness)
    return StandardnessVerdict("standard", None)


class GCMVerdict(NamedTuple):
    finite: bool
    label: object          # joined Dynkin labels, None when not finite


def _arm_lengths(adj, branch):
    out = []
    for first in adj[branch]:
        length = 1
        prev, cur = branch, first
        while True:
            nxt = [v for v in adj[cur] if v != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        out.append(length)
    return sorted(out)


def _classify_component(vs, a):
    n = len(vs)
    if n == 1:
        return "A1"
    edges = []
    for x in range(n):
        for y in range(x + 1, n):
            u, v = vs[x], vs[y]
            if a[u][v] != 0:
                if a[u][v] * a[v][u] > 3:
                    return None
                edges.append((u, v))
    if len(edges) != n - 1:
        return None
    adj = {v: [] for v in vs}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    if max(len(adj[v]) for v in vs) > 3:
        return None
    triple = [(u, v) for u, v in edges if a[u][v] * a[v][u] == 3]
    double = [(u, v) for u, v in edges if a[u][v] * a[v][u] == 2]
    if triple:
        return "G2" if n == 2 else None
    if double:
        if len(double) != 1 or any(len(adj[v]) > 2 for v in vs):
            return None
        u, v = double[0]
        if len(adj[u]) == 1 or len(adj[v]) == 1:
            if n == 2:
                return "B2"
            leaf, other = (u, v) if len(adj[u]) == 1 else (v, u)
            # the -2 sits in the short root's row
            return f"B{n}" if a[leaf][other] == -2 else f"C{n}"
        return "F4" if n == 4 else None
    branch = [v for v in vs if len(adj[v]) == 3]
    if not branch:
        return f"A{n}"
    if len(branch) != 1:
        return None
    arms = _arm_lengths(adj, branch[0])
    if arms[:2] == [1, 1]:
        return f"D{n}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    return None


def gcm_finite_type(matrix) -> GCMVerdict:
    """Finite-type recognition of a generalized Cartan matrix.

    Accepts a CartanData with exact entries or a plain integer matrix;
    components are classified against the A/B/C/D/E/F/G diagrams.
    """
    if isinstance(matrix, CartanData):
        if not matrix.is_exact():
            raise ScenarioError(
                "finite-type recognition needs every Cartan entry exact")
        a = [list(row) for row in matrix.entries]
    else:
        a = [list(row) for row in matrix]
    n = len(a)
    if n == 0 or any(len(row) != n for row in a):
        raise ScenarioError("Cartan matrix must be square and nonempty")
    for i in range(n):
        for j in range(n):
            v = a[i][j]
            if not isinstance(v, int):
                raise ScenarioError("Cartan entries must be integers",
                                    at=(i + 1, j + 1))
            if i == j and v != 2:
                raise ScenarioError("Cartan diagonal must equal 2",
                                    at=(i + 1, j + 1))
            if i != j and v > 0:
                raise ScenarioError("off-diagonal Cartan entries must be <= 0",
                                    at=(i + 1, j + 1))
            if i != j and (v == 0) != (a[j][i] == 0):
                raise ScenarioError("zero entries must be symmetric",
                                    at=(i + 1, j + 1))
    seen = set()
    labels = []
    for v0 in range(n):
        if v0 in seen:
            continue
        comp = [v0]
        seen.add(v0)
        stack = [v0]
        while stack:
            u = stack.pop()
            for v in range(n):
                if v not in seen and a[u][v] != 0:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        label = _classify_component(sorted(comp), a)
        if label is None:
            return GCMVerdict(False, None)
        labels.append(label)
    return GCMVerdict(True, "+".join(labels))
