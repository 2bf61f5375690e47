"""Instance/result serialization and text export of the full MIP
formulations for external cross-checking.

The instance format is line-oriented with explicit section headers so
fixtures stay diff-able; every format carries a version tag.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .attack import AttackResult
from .errors import InputError, SizeLimitError
from .graph import NODE_CLASSES, ComponentPartition, Graph, components
from .response import ReconstructionPlan, flatten

INSTANCE_FORMAT = "rupturekit-instance"
INSTANCE_VERSION = 1
RESULT_SCHEMA = "rupturekit-result/1"
MIP_FORMAT_VERSION = 1

ATTACK_TYPES = ("targeted", "designated", "random", "distributed")

EXPORT_EPSILON = 1e-3
EXPORT_MAX_NODES = 200


class InstanceFormatError(InputError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class InstanceFile:
    n: int
    edges: tuple[tuple[int, int], ...]
    attack_cost: tuple[float, ...]
    link_cost: dict[tuple[int, int], float]
    node_class: Optional[tuple[str, ...]] = None
    budget_attack: Optional[float] = None
    budget_response: Optional[float] = None   # math.inf = unlimited
    attack_type: str = "targeted"
    attack_nodes: tuple[int, ...] = ()        # X for designated/random,
                                              # attackable set for distributed

    def __post_init__(self):
        if self.attack_type not in ATTACK_TYPES:
            raise InputError(f"unknown attack type {self.attack_type!r}")
        if self.attack_type in ("designated", "random") and not self.attack_nodes:
            raise InputError(f"{self.attack_type} attack requires a node set")
        for v in self.attack_nodes:
            if not (1 <= v <= self.n):
                raise InputError(f"attack node {v} out of range")

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges, self.attack_cost, self.link_cost,
                     self.node_class)

    def attackable_nodes(self) -> frozenset[int]:
        if self.attack_type == "distributed":
            return frozenset(self.attack_nodes)
        return frozenset(range(1, self.n + 1))


def parse_instance(text: str) -> InstanceFile:
    """Strict parser with line-numbered error reporting."""
    lines = text.splitlines()
    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            pos += 1
            raw = lines[pos - 1]
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                return pos, stripped
        raise InstanceFormatError(len(lines), "unexpected end of file")

    ln, header = next_line()
    parts = header.split()
    if len(parts) != 3 or parts[0] != "FORMAT" or parts[1] != INSTANCE_FORMAT:
        raise InstanceFormatError(ln, f"expected 'FORMAT {INSTANCE_FORMAT} <version>'")
    if parts[2] != str(INSTANCE_VERSION):
        raise InstanceFormatError(ln, f"unsupported version {parts[2]}")

    ln, nodes_line = next_line()
    if not nodes_line.startswith("NODES "):
        raise InstanceFormatError(ln, "expected NODES section")
    try:
        n = int(nodes_line.split()[1])
    except (IndexError, ValueError):
        raise InstanceFormatError(ln, "NODES needs an integer count")
    if n < 1:
        raise InstanceFormatError(ln, "node count must be >= 1")

    def check_node(ln: int, v: int) -> int:
        if not (1 <= v <= n):
            raise InstanceFormatError(ln, f"node {v} out of range 1..{n}")
        return v

    ln, edges_line = next_line()
    if not edges_line.startswith("EDGES "):
        raise InstanceFormatError(ln, "expected EDGES section")
    try:
        m = int(edges_line.split()[1])
    except (IndexError, ValueError):
        raise InstanceFormatError(ln, "EDGES needs an integer count")
    edges = []
    for _ in range(m):
        ln, line = next_line()
        fields = line.split()
        if len(fields) != 2:
            raise InstanceFormatError(ln, "edge line needs two node indices")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise InstanceFormatError(ln, "edge endpoints must be integers")
        check_node(ln, i), check_node(ln, j)
        if i == j:
            raise InstanceFormatError(ln, f"self-loop at node {i}")
        edges.append((min(i, j), max(i, j)))

    attack_cost = [1.0] * n
    link_cost: dict[tuple[int, int], float] = {}
    node_class: Optional[list[str]] = None
    budget_attack: Optional[float] = None
    budget_response: Optional[float] = None
    attack_type = "targeted"
    attack_nodes: tuple[int, ...] = ()

    ln, section = next_line()
    while section != "END":
        if section == "ATTACK_COSTS":
            ln, section = _parse_attack_costs(next_line, check_node, attack_cost)
        elif section == "LINK_COSTS":
            ln, section = _parse_link_costs(next_line, check_node, link_cost)
        elif section == "CLASSES":
            node_class = ["load"] * n
            ln, section = _parse_classes(next_line, check_node, node_class)
        elif section == "BUDGETS":
            while True:
                ln, line = next_line()
                fields = line.split()
                if fields[0] == "attack" and len(fields) == 2:
                    budget_attack = _parse_budget(ln, fields[1], allow_unlimited=False)
                elif fields[0] == "response" and len(fields) == 2:
                    budget_response = _parse_budget(ln, fields[1], allow_unlimited=True)
                else:
                    section = line
                    break
        elif section.startswith("ATTACK"):
            ln, line = next_line()
            fields = line.split()
            if fields[0] not in ATTACK_TYPES:
                raise InstanceFormatError(ln, f"unknown attack type {fields[0]!r}")
            attack_type = fields[0]
            try:
                attack_nodes = tuple(check_node(ln, int(f)) for f in fields[1:])
            except ValueError:
                raise InstanceFormatError(ln, "attack node list must be integers")
            if attack_type == "targeted" and attack_nodes:
                raise InstanceFormatError(ln, "targeted attack takes no node list")
            if attack_type != "targeted" and not attack_nodes:
                raise InstanceFormatError(ln, f"{attack_type} attack needs a node list")
            ln, section = next_line()
        else:
            raise InstanceFormatError(ln, f"unknown section {section!r}")

    try:
        return InstanceFile(
            n, tuple(sorted(set(edges))), tuple(attack_cost), link_cost,
            tuple(node_class) if node_class else None,
            budget_attack, budget_response, attack_type, attack_nodes,
        )
    except InputError as exc:
        raise InstanceFormatError(0, str(exc))


def _parse_budget(ln: int, token: str, *, allow_unlimited: bool) -> float:
    if token == "unlimited":
        if not allow_unlimited:
            raise InstanceFormatError(ln, "attack budget cannot be unlimited")
        return math.inf
    try:
        value = float(token)
    except ValueError:
        raise InstanceFormatError(ln, f"bad budget value {token!r}")
    if value < 0:
        raise InstanceFormatError(ln, "budgets must be nonnegative")
    return value


def _parse_attack_costs(next_line, check_node, attack_cost):
    while True:
        ln, line = next_line()
        fields = line.split()
        if len(fields) != 2 or not fields[0].lstrip("-").isdigit():
            return ln, line
        v = check_node(ln, int(fields[0]))
        try:
            c = float(fields[1])
        except ValueError:
            raise InstanceFormatError(ln, f"bad cost {fields[1]!r}")
        if c < 0:
            raise InstanceFormatError(ln, "attack costs must be nonnegative")
        attack_cost[v - 1] = c


def _parse_link_costs(next_line, check_node, link_cost):
    while True:
        ln, line = next_line()
        fields = line.split()
        if len(fields) != 3 or not fields[0].lstrip("-").isdigit():
            return ln, line
        i = check_node(ln, int(fields[0]))
        j = check_node(ln, int(fields[1]))
        if i == j:
            raise InstanceFormatError(ln, "link cost pair must be distinct nodes")
        try:
            d = float(fields[2])
        except ValueError:
            raise InstanceFormatError(ln, f"bad cost {fields[2]!r}")
        if d < 0:
            raise InstanceFormatError(ln, "link costs must be nonnegative")
        key = (min(i, j), max(i, j))
        if key in link_cost and abs(link_cost[key] - d) > 1e-9:
            raise InstanceFormatError(
                ln, f"asymmetric link cost for pair {key[0]}-{key[1]}"
            )
        link_cost[key] = d


def _parse_classes(next_line, check_node, node_class):
    while True:
        ln, line = next_line()
        fields = line.split()
        if len(fields) != 2 or not fields[0].lstrip("-").isdigit():
            return ln, line
        v = check_node(ln, int(fields[0]))
        if fields[1] not in NODE_CLASSES:
            raise InstanceFormatError(ln, f"unknown node class {fields[1]!r}")
        node_class[v - 1] = fields[1]


def emit_instance(inst: InstanceFile) -> str:
    """Canonical emitter: fixed section order, sorted entries, 6-digit
    costs; parse(emit(x)) == x and emit is idempotent on canonical text."""
    out = [f"FORMAT {INSTANCE_FORMAT} {INSTANCE_VERSION}"]
    out.append(f"NODES {inst.n}")
    out.append(f"EDGES {len(inst.edges)}")
    for i, j in sorted(inst.edges):
        out.append(f"{i} {j}")
    out.append("ATTACK_COSTS")
    for v in range(1, inst.n + 1):
        out.append(f"{v} {inst.attack_cost[v - 1]:.6f}")
    if inst.link_cost:
        out.append("LINK_COSTS")
        for (i, j), d in sorted(inst.link_cost.items()):
            out.append(f"{i} {j} {d:.6f}")
    if inst.node_class is not None:
        out.append("CLASSES")
        for v in range(1, inst.n + 1):
            out.append(f"{v} {inst.node_class[v - 1]}")
    if inst.budget_attack is not None or inst.budget_response is not None:
        out.append("BUDGETS")
        if inst.budget_attack is not None:
            out.append(f"attack {inst.budget_attack:.6f}")
        if inst.budget_response is not None:
            if math.isinf(inst.budget_response):
                out.append("response unlimited")
            else:
                out.append(f"response {inst.budget_response:.6f}")
    out.append("ATTACK")
    if inst.attack_nodes:
        out.append(inst.attack_type + " " + " ".join(str(v) for v in sorted(inst.attack_nodes)))
    else:
        out.append(inst.attack_type)
    out.append("END")
    return "\n".join(out) + "\n"


# -- result serialization ----------------------------------------------------


def result_to_dict(
    instance_name: str,
    attack: Optional[AttackResult] = None,
    plan: Optional[ReconstructionPlan] = None,
    dynamic: Optional[AttackResult] = None,
    cut_audit: Optional[Sequence[dict]] = None,
    notes: Optional[Sequence[str]] = None,
) -> dict:
    def attack_dict(res: Optional[AttackResult]) -> Optional[dict]:
        if res is None:
            return None
        d: dict = {"status": res.status, "stats": res.stats.to_dict()}
        if res.cut is not None and res.score is not None:
            d.update(
                cut=sorted(res.cut.nodes),
                rupture=res.score.rupture,
                resilience=res.score.resilience,
                largest_component=res.score.largest,
                component_count=res.score.count,
                components=[list(c) for c in res.partition.components],
            )
        if res.relaxed_alpha is not None:
            d["relaxed_alpha"] = res.relaxed_alpha
            d["relaxed_b"] = list(res.relaxed_b)
        return d

    return {
        "schema": RESULT_SCHEMA,
        "instance": instance_name,
        "attack": attack_dict(attack),
        "response": plan.to_dict() if plan is not None else None,
        "dynamic_worst": attack_dict(dynamic),
        "cut_audit": list(cut_audit) if cut_audit else [],
        "notes": list(notes) if notes else [],
    }


def result_to_json(*args, **kwargs) -> str:
    return json.dumps(result_to_dict(*args, **kwargs), indent=2, sort_keys=True) + "\n"


# -- MIP export --------------------------------------------------------------


def _fmt(coef: float) -> str:
    return f"{coef:.6f}"


def _expr(terms: Sequence[tuple[float, str]], constant: float = 0.0) -> str:
    parts = []
    for coef, var in terms:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if mag == 1:
            parts.append(f"{sign} {var}")
        else:
            parts.append(f"{sign} {_fmt(mag)} {var}")
    if constant != 0:
        sign = "-" if constant < 0 else "+"
        parts.append(f"{sign} {_fmt(abs(constant))}")
    if not parts:
        return "0"
    first = parts[0]
    if first.startswith("+ "):
        first = first[2:]
    elif first.startswith("- "):
        first = "-" + first[2:]
    return " ".join([first] + parts[1:])


class _LpWriter:
    def __init__(self, sense: str, header: Sequence[str]):
        self.sense = sense
        self.header = list(header)
        self.obj: str = "0"
        self.rows: list[str] = []
        self.bounds: list[str] = []
        self.binaries: list[str] = []
        self.generals: list[str] = []

    def objective(self, terms, constant=0.0):
        self.obj = _expr(terms, constant)

    def row(self, name: str, terms, op: str, rhs: float):
        self.rows.append(f" {name}: {_expr(terms)} {op} {_fmt(rhs)}")

    def render(self) -> str:
        out = [f"\\ {h}" for h in self.header]
        out.append(self.sense)
        out.append(f" obj: {self.obj}")
        out.append("Subject To")
        out.extend(self.rows)
        if self.bounds:
            out.append("Bounds")
            out.extend(f" {b}" for b in self.bounds)
        if self.binaries:
            out.append("Binaries")
            out.extend(f" {v}" for v in self.binaries)
        if self.generals:
            out.append("Generals")
            out.extend(f" {v}" for v in self.generals)
        out.append("End")
        return "\n".join(out) + "\n"


def export_mip(
    inst: InstanceFile,
    which: str,
    cut: Optional[Sequence[int]] = None,
    power: bool = False,
) -> str:
    """Render the chosen formulation as deterministic LP-style text.

    `which` is one of 'attack', 'response', 'reduced'; the latter two
    require the realized cut set to derive the surviving components.
    """
    if inst.n > EXPORT_MAX_NODES:
        raise SizeLimitError(
            f"{inst.n} nodes exceed the export cap {EXPORT_MAX_NODES}"
        )
    if which == "attack":
        return _export_attack(inst)
    if which in ("response", "reduced"):
        if cut is None:
            raise InputError(f"{which} export requires the realized cut set")
        g = inst.to_graph()
        part = components(g, cut)
        if which == "response":
            return _export_response(inst, sorted(cut), part)
        return _export_reduced(inst, sorted(cut), part, power)
    raise InputError(f"unknown formulation {which!r}")


def _export_attack(inst: InstanceFile) -> str:
    n = inst.n
    c_count = n  # one potential component per node
    g = inst.to_graph()
    adj = {(i, j): (1 if g.has_edge(i, j) else 0)
           for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
    attackable = inst.attackable_nodes()
    w = _LpWriter("Maximize", [
        f"rupturekit mip export v{MIP_FORMAT_VERSION}",
        "formulation: attack",
        f"attack_type: {inst.attack_type}",
    ])

    def v(i, c):
        return f"v_{i}_{c}"

    def y(i, j):
        return f"y_{i}_{j}"

    obj = [(1.0, v(i, c)) for i in range(1, n + 1) for c in range(1, c_count + 1)]
    obj.append((-1.0, "alphaA"))
    obj.extend((1.0, f"bA_{c}") for c in range(1, c_count + 1))
    w.objective(obj, constant=-float(n))

    for i in range(1, n + 1):
        terms = [(1.0, v(i, c)) for c in range(1, c_count + 1)]
        if i in attackable:
            w.row(f"r4b_{i}", terms, "<=", 1.0)
        else:
            # intact nodes stay active: the assignment row becomes an equality
            w.row(f"r20b_{i}", terms, "=", 1.0)
    for c in range(1, c_count + 1):
        w.row(f"r4c_{c}",
              [(1.0, v(i, c)) for i in range(1, n + 1)] + [(-1.0, "alphaA")],
              "<=", 0.0)
    for c in range(1, c_count + 1):
        w.row(f"r4d_{c}",
              [(1.0, f"bA_{c}")] + [(-1.0, v(i, c)) for i in range(1, n + 1)],
              "<=", 0.0)
    for i in range(1, n + 1):
        terms = [(1.0, y(i, j)) for j in range(1, n + 1) if j != i]
        terms += [(-(n - 1.0), v(i, c)) for c in range(1, c_count + 1)]
        w.row(f"r4e_{i}", terms, "<=", 0.0)
    budget = inst.budget_attack if inst.budget_attack is not None else 0.0
    total_cost = sum(inst.attack_cost)
    w.row("r4f",
          [(-inst.attack_cost[i - 1], v(i, c))
           for i in range(1, n + 1) for c in range(1, c_count + 1)],
          "<=", budget - total_cost)
    for i, j in combinations(range(1, n + 1), 2):
        w.row(f"r4g_{i}_{j}", [(1.0, y(i, j)), (-1.0, y(j, i))], "=", 0.0)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i <= j:
                continue
            a = float(adj[(i, j)])
            terms = [(a, v(i, c)) for c in range(1, c_count + 1)]
            terms += [(a, v(j, c)) for c in range(1, c_count + 1)]
            terms.append((-1.0, y(i, j)))
            w.row(f"r4h_{i}_{j}", terms, "<=", a)
            for c in range(1, c_count + 1):
                w.row(f"r4i_{i}_{j}_{c}",
                      [(1.0, y(i, j)), (a, v(i, c)), (-a, v(j, c))], "<=", a)
                w.row(f"r4j_{i}_{j}_{c}",
                      [(1.0, y(i, j)), (-a, v(i, c)), (a, v(j, c))], "<=", a)

    for i in range(1, n + 1):
        for c in range(1, c_count + 1):
            w.binaries.append(v(i, c))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                w.binaries.append(y(i, j))
    for c in range(1, c_count + 1):
        w.binaries.append(f"bA_{c}")
    w.generals.append("alphaA")
    return w.render()


def _export_response(inst: InstanceFile, cut: list[int],
                     part: ComponentPartition) -> str:
    n_r = [v for v in range(1, inst.n + 1) if v not in set(cut)]
    s = part.count
    big_m = float(inst.n + 1)
    eps = EXPORT_EPSILON
    budget = inst.budget_response
    if budget is None or math.isinf(budget):
        budget = sum(inst.link_cost.values())  # effectively non-binding
    w = _LpWriter("Minimize", [
        f"rupturekit mip export v{MIP_FORMAT_VERSION}",
        "formulation: response",
        f"cut: {' '.join(str(v) for v in cut)}",
    ])

    def v(i, c):
        return f"vR_{i}_{c}"

    obj = [(-1.0, "alphaR")]
    obj.extend((1.0, f"bR_{c}") for c in range(1, s + 1))
    obj.extend((eps, f"tR_{c}") for c in range(1, s + 1))
    w.objective(obj, constant=-float(len(cut)))

    for c in range(1, s + 1):
        w.row(f"r7b_lo_{c}",
              [(1.0, v(i, c)) for i in n_r] + [(-1.0, "alphaR")], "<=", 0.0)
        w.row(f"r7b_hi_{c}",
              [(1.0, "alphaR")] + [(-1.0, v(i, c)) for i in n_r]
              + [(big_m, f"tR_{c}")], "<=", big_m)
    w.row("r7c", [(1.0, f"tR_{c}") for c in range(1, s + 1)], ">=", 1.0)
    for i in n_r:
        w.row(f"r7d_{i}", [(1.0, v(i, c)) for c in range(1, s + 1)], "=", 1.0)
    for c in range(1, s + 1):
        w.row(f"r7e_{c}",
              [(1.0, v(i, c)) for i in n_r] + [(-float(len(n_r)), f"bR_{c}")],
              "<=", 0.0)
    budget_terms = []
    for i, j in combinations(n_r, 2):
        d = inst.link_cost.get((i, j))
        if d is not None:
            budget_terms.append((d, f"yR_{i}_{j}"))
    w.row("r7f", budget_terms, "<=", budget)
    for i, j in combinations(n_r, 2):
        w.row(f"r7g_{i}_{j}", [(1.0, f"yR_{i}_{j}"), (-1.0, f"yR_{j}_{i}")], "=", 0.0)
        w.row(f"r7h_{i}_{j}", [(1.0, f"qR_{i}_{j}"), (-1.0, f"qR_{j}_{i}")], "=", 0.0)
    for cm, cn in combinations(range(1, s + 1), 2):
        vm, vn = part.components[cm - 1], part.components[cn - 1]
        bridge = [(1.0, f"yR_{u}_{wv}") for u in vm for wv in vn]
        for i in vm:
            for j in vn:
                w.row(f"r7i_lo_{cm}_{cn}_{i}_{j}",
                      [(1.0, f"qR_{i}_{j}")] + [(-c, var) for c, var in bridge],
                      "<=", 0.0)
                w.row(f"r7i_hi_{cm}_{cn}_{i}_{j}",
                      bridge + [(-big_m, f"qR_{i}_{j}")], "<=", 0.0)
                for k in range(1, s + 1):
                    w.row(f"r7j_{i}_{j}_{k}",
                          [(1.0, v(i, k)), (1.0, v(j, k)), (-1.0, f"qR_{i}_{j}")],
                          "<=", 1.0)
                    w.row(f"r7k_{i}_{j}_{k}",
                          [(1.0, f"qR_{i}_{j}"), (1.0, v(i, k)), (-1.0, v(j, k))],
                          "<=", 1.0)
                    w.row(f"r7l_{i}_{j}_{k}",
                          [(1.0, f"qR_{i}_{j}"), (-1.0, v(i, k)), (1.0, v(j, k))],
                          "<=", 1.0)

    for i in n_r:
        for c in range(1, s + 1):
            w.binaries.append(v(i, c))
    for i in n_r:
        for j in n_r:
            if i != j:
                w.binaries.append(f"yR_{i}_{j}")
    for i in n_r:
        for j in n_r:
            if i != j:
                w.binaries.append(f"qR_{i}_{j}")
    for c in range(1, s + 1):
        w.binaries.append(f"bR_{c}")
    for c in range(1, s + 1):
        w.binaries.append(f"tR_{c}")
    w.generals.append("alphaR")
    return w.render()


def _export_reduced(inst: InstanceFile, cut: list[int],
                    part: ComponentPartition, power: bool) -> str:
    from .response import classify_components, mceic_matrix

    g = inst.to_graph()
    s = part.count
    if s < 2:
        raise InputError("reduced export needs a disconnected attacked network")
    flat = flatten(s)
    mc = mceic_matrix(g, part)
    big_m = float(inst.n + 1)
    eps = EXPORT_EPSILON
    budget = inst.budget_response
    if budget is None or math.isinf(budget):
        budget = sum(mc.cost.values())
    w = _LpWriter("Minimize", [
        f"rupturekit mip export v{MIP_FORMAT_VERSION}",
        "formulation: reduced",
        f"cut: {' '.join(str(v) for v in cut)}",
    ])

    obj = [(-1.0, "alphaR")]
    obj.extend((-1.0, f"xhat_{z}") for z in range(1, flat.length + 1))
    obj.extend((eps, f"tR_{m}") for m in range(1, s + 1))
    w.objective(obj, constant=float(s - len(cut)))

    w.row("r19b", [(1.0, f"tR_{m}") for m in range(1, s + 1)], ">=", 1.0)
    sizes = part.sizes
    for m in range(1, s + 1):
        cross = []
        for nn in range(1, s + 1):
            if nn == m:
                continue
            z = flat.sigma(min(m, nn), max(m, nn))
            cross.append((float(sizes[nn - 1]), f"xhat_{z}"))
        w.row(f"r19c_lo_{m}",
              cross + [(-1.0, "alphaR")], "<=", -float(sizes[m - 1]))
        w.row(f"r19c_hi_{m}",
              [(1.0, "alphaR")] + [(-c, var) for c, var in cross]
              + [(big_m, f"tR_{m}")], "<=", big_m + float(sizes[m - 1]))
    w.row("r19d",
          [(mc.cost[flat.unsigma(z)], f"xhat_{z}")
           for z in range(1, flat.length + 1)],
          "<=", budget)
    if power:
        classes = classify_components(g, part)
        gens = [i for i in range(1, s + 1) if classes[i - 1] == "has-generator"]
        loads = [i for i in range(1, s + 1) if classes[i - 1] == "load-only"]
        for m, nn in combinations(loads, 2):
            terms = [(1.0, f"xhat_{flat.sigma(m, nn)}")]
            for i in gens:
                terms.append((-1.0, f"xhat_{flat.sigma(min(m, i), max(m, i))}"))
                terms.append((-1.0, f"xhat_{flat.sigma(min(nn, i), max(nn, i))}"))
            w.row(f"r21_{m}_{nn}", terms, "<=", 0.0)

    for z in range(1, flat.length + 1):
        w.binaries.append(f"xhat_{z}")
    for m in range(1, s + 1):
        w.binaries.append(f"tR_{m}")
    w.bounds.append("alphaR >= 0")
    return w.render()
