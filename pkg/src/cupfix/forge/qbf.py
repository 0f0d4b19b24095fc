"""Formula reductions: quantified 3-CNF and plain 3-SAT to instances.

Every variable becomes a selection gadget for its assignment, every clause
a gadget selecting one literal; enlarging pads align the gadget rounds so
later existential blocks decide after earlier universal outcomes are
known.  The favorite beats every variable player and loses to every clause
player, so it wins surely iff the coalition can keep unsatisfied literals
out of the final.  Thresholds are always 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..model import (
    DenseMatrix,
    HALF,
    Inner,
    Instance,
    Leaf,
    MissingRoleAnnotations,
    ONE,
    Player,
    RuleMatrix,
    SizeLimitExceeded,
    TournamentTree,
    ZERO,
    balanced_tree,
)
from .fragments import (
    BadParameter,
    Fragment,
    GadgetKind,
    build_gadget,
    enlarge_sequence,
)

Literal = tuple[str, bool]  # variable name, positive?
Clause = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class QbfFormula:
    """Prenex 3-CNF with alternating quantifier blocks.

    Invariant: the first block is existential and the block count is odd;
    :meth:`make` normalizes arbitrary prefixes by merging equal neighbours
    and padding with fresh unused variables.
    """

    blocks: tuple[tuple[str, tuple[str, ...]], ...]  # ('E'|'A', variables)
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        if not self.blocks or self.blocks[0][0] != "E":
            raise BadParameter("first quantifier block must be existential")
        if len(self.blocks) % 2 != 1:
            raise BadParameter("block count must be odd")
        declared: set[str] = set()
        for quant, variables in self.blocks:
            if quant not in ("E", "A") or not variables:
                raise BadParameter("blocks must be nonempty 'E'/'A' groups")
            if declared & set(variables):
                raise BadParameter("a variable appears in two blocks")
            declared.update(variables)
        for clause in self.clauses:
            if len(clause) != 3:
                raise BadParameter("clauses must have exactly three literals")
            for var, _ in clause:
                if var not in declared:
                    raise BadParameter(f"clause uses unquantified variable {var!r}")

    @staticmethod
    def make(
        blocks: Sequence[tuple[str, Sequence[str]]], clauses: Sequence[Sequence[Literal]]
    ) -> "QbfFormula":
        merged: list[tuple[str, list[str]]] = []
        for quant, variables in blocks:
            variables = list(variables)
            if not variables:
                continue
            if merged and merged[-1][0] == quant:
                merged[-1][1].extend(variables)
            else:
                merged.append((quant, variables))
        used = {v for _, vs in merged for v in vs}

        def fresh(idx: int) -> str:
            name = f"_pad{idx}"
            while name in used:
                name += "_"
            used.add(name)
            return name

        if not merged or merged[0][0] != "E":
            merged.insert(0, ("E", [fresh(0)]))
        if len(merged) % 2 == 0:
            merged.append(("E", [fresh(1)]))
        return QbfFormula(
            tuple((q, tuple(vs)) for q, vs in merged),
            tuple(tuple(tuple(lit) for lit in clause) for clause in clauses),
        )

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for _, vs in self.blocks for v in vs)


def eval_qbf(formula: QbfFormula, limit: int = 20) -> bool:
    """Exact truth value by full enumeration over the quantifier prefix."""
    if len(formula.variables) > limit:
        raise SizeLimitExceeded(
            f"{len(formula.variables)} variables exceeds the evaluation limit {limit}"
        )

    def sat(assignment: dict[str, bool]) -> bool:
        return all(
            any(assignment[var] == positive for var, positive in clause)
            for clause in formula.clauses
        )

    def ev(idx: int, assignment: dict[str, bool]) -> bool:
        if idx == len(formula.blocks):
            return sat(assignment)
        quant, variables = formula.blocks[idx]
        outcomes = (
            ev(idx + 1, assignment | dict(zip(variables, values)))
            for values in itertools.product((False, True), repeat=len(variables))
        )
        return any(outcomes) if quant == "E" else all(outcomes)

    return ev(0, {})


def parse_qbf(text: str) -> QbfFormula:
    """DIMACS-like input: 'e'/'a' prefix lines then 3-literal clause lines."""
    blocks: list[tuple[str, list[str]]] = []
    clauses: list[list[Literal]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("c", "#", "p")):
            continue
        tokens = line.split()
        if tokens[0] in ("e", "a"):
            if tokens[-1] != "0":
                raise BadParameter(f"prefix line not 0-terminated: {raw!r}")
            variables = [f"x{int(t)}" for t in tokens[1:-1]]
            blocks.append(("E" if tokens[0] == "e" else "A", variables))
        else:
            if tokens[-1] != "0":
                raise BadParameter(f"clause line not 0-terminated: {raw!r}")
            lits = [int(t) for t in tokens[:-1]]
            clauses.append([(f"x{abs(l)}", l > 0) for l in lits])
    if not blocks:
        raise BadParameter("no quantifier prefix lines found")
    return QbfFormula.make(blocks, clauses)


def parse_cnf(text: str) -> list[Clause]:
    """Plain DIMACS 3-CNF clause list."""
    clauses: list[Clause] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("c", "#", "p", "e", "a")):
            continue
        tokens = [int(t) for t in line.split()]
        if not tokens or tokens[-1] != 0:
            raise BadParameter(f"clause line not 0-terminated: {raw!r}")
        lits = tokens[:-1]
        if len(lits) != 3:
            raise BadParameter("clauses must have exactly three literals")
        clauses.append(tuple((f"x{abs(l)}", l > 0) for l in lits))
    return clauses


# ---------------------------------------------------------------------------
# Shared reduction assembly
# ---------------------------------------------------------------------------


class _Builder:
    """Accumulates players, probability-group metadata and gadget pairs."""

    def __init__(self) -> None:
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        self.group_key: list[str] = []
        self.meta_of_group: dict[str, tuple] = {}
        self.roles: dict[int, str] = {}
        self.table: dict[tuple[str, str], Fraction] = {}
        self._dummy_count = 0

    def player(self, name: str, meta: tuple, role: str) -> int:
        key = ":".join(str(part) for part in meta)
        pid = len(self.names)
        self.ids[name] = pid
        self.names.append(name)
        self.group_key.append(key)
        old = self.meta_of_group.setdefault(key, meta)
        assert old == meta, f"group key collision for {key}"
        self.roles[pid] = role
        return pid

    def dummy(self) -> str:
        self._dummy_count += 1
        name = f"d.{self._dummy_count}"
        self.player(name, ("dummy",), "dummy")
        return name

    def register_fragment(self, frag: Fragment, metas: dict[str, tuple]) -> None:
        for name in frag.players:
            meta = metas[name]
            role = frag.roles.get(name, "dummy")
            self.player(name, meta, role)
        for (a, b), p in frag.pairs.items():
            self.set_pair(a, b, p)

    def set_pair(self, name_a: str, name_b: str, p: Fraction) -> None:
        ga, gb = self.group_key[self.ids[name_a]], self.group_key[self.ids[name_b]]
        if (ga, gb) in self.table:
            assert self.table[(ga, gb)] == p, f"conflicting rule for ({ga}, {gb})"
            return
        if (gb, ga) in self.table:
            assert self.table[(gb, ga)] == 1 - p, f"conflicting rule for ({gb}, {ga})"
            return
        self.table[(ga, gb)] = p

    def fill_table(self, resolve) -> None:
        keys = sorted(self.meta_of_group)
        for ka, kb in itertools.combinations(keys, 2):
            if (ka, kb) in self.table or (kb, ka) in self.table:
                continue
            p = resolve(self.meta_of_group[ka], self.meta_of_group[kb])
            if p is not None:
                self.table[(ka, kb)] = p

    def finish(
        self,
        leaf_names: Sequence[str],
        coalition: Sequence[str],
        favorite: str,
        uniform_groups: Sequence[str] = ("dummy",),
    ) -> Instance:
        matrix = RuleMatrix(
            groups=self.group_key,
            table=self.table,
            overrides={},
            default="half",
            uniform_groups=uniform_groups,
        )
        tree = balanced_tree([self.ids[n] for n in leaf_names])
        return Instance(
            players=tuple(Player(i, n) for i, n in enumerate(self.names)),
            tree=tree,
            matrix=matrix,
            coalition=frozenset(self.ids[c] for c in coalition),
            favorite=self.ids[favorite],
            threshold=ONE,
            roles=dict(self.roles),
        )


def _is_dummy_kind(meta: tuple) -> bool:
    return meta[0] in ("dummy", "cdummy")


def _formula_resolve(meta_a: tuple, meta_b: tuple) -> Optional[Fraction]:
    """Cross-gadget probability rules shared by both formula reductions."""

    def oriented(x: tuple, y: tuple):
        return (x, y, False) if x[0] <= y[0] else (y, x, True)

    ka, kb = meta_a[0], meta_b[0]
    if "estar" in (ka, kb):
        other = meta_b if ka == "estar" else meta_a
        estar_first = ka == "estar"
        if other[0] == "var":
            return ONE if estar_first else ZERO
        if other[0] == "cl":
            return ZERO if estar_first else ONE
    if {ka, kb} == {"cl", "var"}:
        cl = meta_a if ka == "cl" else meta_b
        var = meta_b if ka == "cl" else meta_a
        _, _, _, lit_var, lit_positive = cl
        _, var_name, value = var
        cl_wins = lit_var == var_name and value != lit_positive
        p_cl = ONE if cl_wins else ZERO
        return p_cl if ka == "cl" else 1 - p_cl
    if ka == "var" and kb == "var":
        return HALF
    if ka == "cl" and kb == "cl":
        return HALF
    a_dummy, b_dummy = _is_dummy_kind(meta_a), _is_dummy_kind(meta_b)
    if a_dummy and not b_dummy:
        return ZERO
    if b_dummy and not a_dummy:
        return ONE
    return None  # remaining probabilities are the 1/2 default


def _variable_metas(frag: Fragment, var: str, existential: bool) -> dict[str, tuple]:
    if existential:
        return {
            f"q.{var}": ("q", var),
            f"xT.{var}": ("var", var, True),
            f"xF.{var}": ("var", var, False),
            f"d.{var}": ("dummy",),
        }
    return {
        f"yT.{var}": ("var", var, True),
        f"yF.{var}": ("var", var, False),
    }


def _clause_metas(frag: Fragment, ci: int, clause: Clause) -> dict[str, tuple]:
    tag = f"C{ci}"
    metas: dict[str, tuple] = {f"qc.{tag}": ("qc", ci)}
    for j in (1, 2, 3):
        var, positive = clause[j - 1]
        metas[f"c{j}.{tag}"] = ("cl", ci, j, var, positive)
    metas[f"d1.{tag}"] = ("dummy",)
    metas[f"d2.{tag}"] = ("dummy",)
    # these two meet each other in a pinned-order game, so they cannot
    # join the interchangeable dummy pool
    metas[f"d3.{tag}"] = ("cdummy", f"d3.{tag}")
    metas[f"d4.{tag}"] = ("cdummy", f"d4.{tag}")
    return metas


def qbf_to_instance(formula: QbfFormula, size_cap: int = 1 << 17) -> Instance:
    """Balanced instance whose optimum is 1 iff the formula is true."""
    k = len(formula.blocks)
    m = len(formula.clauses)
    if m == 0:
        raise BadParameter("need at least one clause")
    total_vars = len(formula.variables)
    block_size = 1 << (3 * k + 3)
    nstar = 1
    while nstar < block_size * (total_vars + m):
        nstar <<= 1
    if 4 * nstar > size_cap:
        raise SizeLimitExceeded(
            f"instance would have {4 * nstar} players, cap is {size_cap}"
        )

    b = _Builder()
    estar = "e*"
    b.player(estar, ("estar",), "favorite")

    variables_seq: list[str] = []
    coalition: list[str] = []
    for block_idx, (quant, block_vars) in enumerate(formula.blocks, start=1):
        for var in block_vars:
            if quant == "E":
                frag = build_gadget(GadgetKind.EXISTENTIAL, name=var)
                coalition.append(f"q.{var}")
            else:
                frag = build_gadget(GadgetKind.UNIVERSAL, name=var)
            b.register_fragment(frag, _variable_metas(frag, var, quant == "E"))
            variables_seq.extend(
                enlarge_sequence(
                    frag.leaf_names(), 3 * (block_idx - 1), 3 * k + 3, b.dummy
                )
            )
    while len(variables_seq) < nstar:
        variables_seq.append(b.dummy())

    clauses_seq: list[str] = []
    for ci, clause in enumerate(formula.clauses):
        frag = build_gadget(GadgetKind.CLAUSE, name=f"C{ci}")
        coalition.append(f"qc.C{ci}")
        b.register_fragment(frag, _clause_metas(frag, ci, clause))
        clauses_seq.extend(
            enlarge_sequence(frag.leaf_names(), 3 * k, 3 * k + 3, b.dummy)
        )
    while len(clauses_seq) < nstar:
        clauses_seq.append(b.dummy())

    tail = [b.dummy() for _ in range(2 * nstar - 1)]
    leaf_names = variables_seq + clauses_seq + [estar] + tail

    b.fill_table(_formula_resolve)
    return b.finish(leaf_names, coalition, estar)


def sat_to_first_round_instance(
    clauses: Sequence[Clause], size_cap: int = 1 << 17
) -> Instance:
    """Balanced instance where the round-one best response settles everything.

    The optimum (and hence the best-response value) is 1 iff the 3-CNF is
    satisfiable; every coalition decision happens in round one.
    """
    clauses = [tuple(tuple(lit) for lit in clause) for clause in clauses]
    if not clauses:
        raise BadParameter("need at least one clause")
    for clause in clauses:
        if len(clause) != 3:
            raise BadParameter("clauses must have exactly three literals")
    variables = sorted({var for clause in clauses for var, _ in clause})
    n, m = len(variables), len(clauses)
    nstar = 1
    while nstar < 8 * (n + m):
        nstar <<= 1
    if 4 * nstar > size_cap:
        raise SizeLimitExceeded(
            f"instance would have {4 * nstar} players, cap is {size_cap}"
        )

    b = _Builder()
    estar = "e*"
    b.player(estar, ("estar",), "favorite")

    variables_seq: list[str] = []
    coalition: list[str] = []
    for var in variables:
        frag = build_gadget(GadgetKind.EXISTENTIAL, name=var)
        coalition.append(f"q.{var}")
        b.register_fragment(frag, _variable_metas(frag, var, True))
        variables_seq.extend(enlarge_sequence(frag.leaf_names(), 0, 3, b.dummy))
    while len(variables_seq) < nstar:
        variables_seq.append(b.dummy())

    clauses_seq: list[str] = []
    for ci, clause in enumerate(clauses):
        tag = f"C{ci}"
        frag = build_gadget(GadgetKind.CLAUSE_FIRST_ROUND, name=tag)
        metas: dict[str, tuple] = {f"ens.{tag}": ("ens", ci), f"d.{tag}": ("dummy",)}
        for j in (1, 2, 3):
            var, positive = clause[j - 1]
            metas[f"c{j}.{tag}"] = ("cl", ci, j, var, positive)
            metas[f"q{j}.{tag}"] = ("qfr", ci, j)
            coalition.append(f"q{j}.{tag}")
        b.register_fragment(frag, metas)
        clauses_seq.extend(frag.leaf_names())
    while len(clauses_seq) < nstar:
        clauses_seq.append(b.dummy())

    tail = [b.dummy() for _ in range(2 * nstar - 1)]
    leaf_names = variables_seq + clauses_seq + [estar] + tail

    b.fill_table(_formula_resolve)
    return b.finish(leaf_names, coalition, estar)


# ---------------------------------------------------------------------------
# Trimming balanced reduction instances to generalized ones
# ---------------------------------------------------------------------------


def trim_to_generalized(inst: Instance) -> Instance:
    """Drop everything off the root-to-non-dummy-leaf paths.

    Vertices keep their depths, so every surviving game still happens in
    its original round; unary vertices are repaired with fresh dummies that
    lose to every non-dummy.  The decision at threshold 1 is preserved and
    the tree shrinks to polynomial size in the non-dummy count.
    """
    if inst.roles is None:
        raise MissingRoleAnnotations(
            "trimming needs generator role annotations on the instance"
        )
    dummies = {pid for pid, role in inst.roles.items() if role == "dummy"}
    if inst.favorite in dummies:
        raise BadParameter("the favorite cannot be a dummy")
    if not dummies:
        return inst

    new_count = 0

    def rebuild(node: TournamentTree):
        nonlocal new_count
        if isinstance(node, Leaf):
            return node if node.player not in dummies else None
        left = rebuild(node.left)
        right = rebuild(node.right)
        if left is None and right is None:
            return None
        if left is None or right is None:
            new_count += 1
            filler = ("new", new_count - 1)
            return (filler, right) if left is None else (left, filler)
        return (left, right)

    skeleton = rebuild(inst.tree)
    assert skeleton is not None, "an instance has at least one non-dummy player"

    survivors = [p.id for p in inst.players if p.id not in dummies]
    new_id = {old: i for i, old in enumerate(survivors)}
    names = [inst.players[old].name for old in survivors]
    used = set(names)
    for i in range(new_count):
        name = f"td{i + 1}"
        while name in used:
            name += "_"
        used.add(name)
        names.append(name)
    n_survivors = len(survivors)
    n_total = len(names)

    def normalize(node) -> TournamentTree:
        if isinstance(node, Leaf):
            return Leaf(new_id[node.player])
        if isinstance(node, tuple) and len(node) == 2 and node[0] == "new":
            return Leaf(n_survivors + node[1])
        return Inner(normalize(node[0]), normalize(node[1]))

    tree = normalize(skeleton)

    rows = [[ZERO] * n_total for _ in range(n_total)]
    for i, old_i in enumerate(survivors):
        for j, old_j in enumerate(survivors):
            if i != j:
                rows[i][j] = inst.matrix.p(old_i, old_j)
    for i in range(n_survivors, n_total):
        for j in range(n_total):
            if i == j:
                continue
            rows[i][j] = HALF if j >= n_survivors else ZERO
            rows[j][i] = HALF if j >= n_survivors else ONE

    roles = {new_id[old]: inst.roles[old] for old in survivors if old in inst.roles}
    roles.update({i: "dummy" for i in range(n_survivors, n_total)})

    return Instance(
        players=tuple(Player(i, name) for i, name in enumerate(names)),
        tree=tree,
        matrix=DenseMatrix(rows),
        coalition=frozenset(new_id[c] for c in inst.coalition if c in new_id),
        favorite=new_id[inst.favorite],
        threshold=inst.threshold,
        roles=roles,
    )
