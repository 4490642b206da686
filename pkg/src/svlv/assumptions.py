"""Proof dependency graph: what each verification claim rests on.

A claim such as "no run-time error in Caller" is only as good as the things
it was proved from. Calls make a claim depend on the callee's body (through
its own proof) and on the callee's postcondition (used as an axiom). Pragmas
and suppressed checks contribute facts that were never proved. The graph
records these edges; the text report lists them per claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .frontend import ast as A
from .frontend.resolver import ResolvedAst

CLAIM_KINDS = ("AoRTE", "PostEstablished")
NODE_KINDS = ("callee_body", "callee_post", "pragma_assume", "suppression", "target_axiom", "unproved_vc")


@dataclass(frozen=True, order=True)
class Claim:
    subject: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in CLAIM_KINDS:
            raise ValueError(f"unknown claim kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}({self.subject})"


@dataclass(frozen=True, order=True)
class Node:
    """An atomic assumption: something a proof relies on without proving it."""

    kind: str
    key: str

    def __post_init__(self) -> None:
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown assumption kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}({self.key})"


@dataclass
class AssumptionGraph:
    graph: nx.DiGraph = field(default_factory=nx.DiGraph)
    claims: list = field(default_factory=list)
    # subprograms whose body cannot be trusted: unproved VCs or no body at all
    unverified: set = field(default_factory=set)
    spec_only: set = field(default_factory=set)
    groups: list = field(default_factory=list)  # recursive claim groups, as sorted name lists

    def depends(self, claim: Claim) -> list:
        """Direct dependencies of ``claim``, sorted by their rendering."""
        return sorted((n for n in self.graph.successors(claim) if isinstance(n, Node)), key=str)

    def closure(self, claim: Claim) -> list:
        """Every atomic assumption reachable from ``claim``."""
        return sorted((n for n in nx.descendants(self.graph, claim) if isinstance(n, Node)), key=str)

    def conditional(self, claim: Claim) -> bool:
        """Whether the claim rests on the body of a subprogram that is not fully verified."""
        return any(n.kind == "callee_body" and n.key in self.unverified for n in self.closure(claim))

    def is_acyclic_modulo_groups(self) -> bool:
        return nx.is_directed_acyclic_graph(nx.condensation(self.graph))


def calls_of(sub: A.Subprogram) -> list:
    """Subprograms called anywhere in ``sub`` (contracts, initializers, body), first-call order."""
    exprs = [e for e in (sub.pre, sub.post) if e is not None]
    exprs += [d.init for d in sub.locals or [] if getattr(d, "init", None) is not None]
    for s in A.walk_stmts(sub.body or []):
        exprs.extend(A.stmt_exprs(s))
    found: dict = {}
    for e in exprs:
        for n in A.walk_expr(e):
            # a name resolving to a subprogram can only be a call
            ref = getattr(n, "ref", None)
            if isinstance(n, (A.Apply, A.Name)) and isinstance(ref, A.Subprogram):
                found.setdefault(id(ref), ref)
    return list(found.values())


def vc_assumptions(vc) -> list:
    """Atomic assumptions named by a VC's hypotheses, sorted."""
    out = set()
    for h in vc.hypotheses:
        if h.provenance in ("pragma_assume", "suppression", "target_axiom"):
            out.add(Node(h.provenance, h.source))
        elif h.provenance == "callee_postcondition":
            out.add(Node("callee_post", h.source.lower()))
    return sorted(out, key=str)


def _unproved(vc) -> bool:
    return vc.status is None or not vc.status.proved


def build_graph(vcs: list, program: ResolvedAst | None) -> AssumptionGraph:
    g = AssumptionGraph()
    if program is None:
        return g
    by_sub: dict = {}
    for vc in vcs:
        by_sub.setdefault(vc.subprogram, []).append(vc)
    subs = [sub for _, sub in program.subprograms()]
    bodies = [s for s in subs if s.body is not None]
    g.spec_only = {s.key for s in subs if s.body is None}
    g.unverified = set(g.spec_only) | {s.key for s in bodies if any(_unproved(v) for v in by_sub.get(s.key, []))}

    calls = {s.key: [c.key for c in calls_of(s)] for s in bodies}
    direct: dict = {}
    for s in bodies:
        mine = by_sub.get(s.key, [])
        shared = set()
        for c in calls[s.key]:
            shared.add(Node("callee_body", c))
            shared.add(Node("callee_post", c))
        aorte, post = set(shared), set(shared)
        for vc in mine:
            target = post if vc.kind == "postcondition" else aorte
            if _unproved(vc):
                target.add(Node("unproved_vc", vc.id))
            if vc.suppressed:
                target.add(Node("suppression", str(vc.loc)))
            for n in vc_assumptions(vc):
                if n.kind != "callee_post":
                    target.add(n)
        direct[Claim(s.key, "AoRTE")] = aorte
        if s.post is not None:
            direct[Claim(s.key, "PostEstablished")] = post

    # mutually recursive subprograms share one dependency set
    cg = nx.DiGraph()
    cg.add_nodes_from(calls)
    cg.add_edges_from((a, b) for a, cs in calls.items() for b in cs if b in calls)
    for scc in nx.strongly_connected_components(cg):
        recursive = len(scc) > 1 or any(cg.has_edge(m, m) for m in scc)
        if not recursive:
            continue
        g.groups.append(sorted(scc))
        for kind in CLAIM_KINDS:
            members = [Claim(m, kind) for m in scc if Claim(m, kind) in direct]
            union = set().union(*(direct[c] for c in members)) if members else set()
            for c in members:
                direct[c] = set(union)
    g.groups.sort()

    g.claims = sorted(direct, key=lambda c: (c.subject, CLAIM_KINDS.index(c.kind)))
    for claim in g.claims:
        g.graph.add_node(claim)
        for n in direct[claim]:
            g.graph.add_edge(claim, n)
    # a callee's body stands for its own claims, so assumptions propagate to callers
    for claim in g.claims:
        if g.graph.has_node(Node("callee_body", claim.subject)):
            g.graph.add_edge(Node("callee_body", claim.subject), claim)
        if claim.kind == "PostEstablished" and g.graph.has_node(Node("callee_post", claim.subject)):
            g.graph.add_edge(Node("callee_post", claim.subject), claim)
    return g


def emit_report(g: AssumptionGraph) -> str:
    """One block per claim: ``claim K(S)`` then sorted ``depends <node>`` lines.

    Assumptions reached only through a callee are listed with ``via`` and the
    callee node they came through. A claim resting on an unverified body is
    marked ``[conditional]``; a body that does not exist is ``[unverifiable]``.
    """
    blocks = []
    for claim in g.claims:
        head = f"claim {claim}"
        if g.conditional(claim):
            head += " [conditional]"
        lines = [head]
        direct = g.depends(claim)
        for n in direct:
            line = f"  depends {n}"
            if n.kind == "callee_body" and n.key in g.spec_only:
                line += " [unverifiable]"
            lines.append(line)
        via = {}
        for n in direct:
            if n.kind in ("callee_body", "callee_post"):
                for m in nx.descendants(g.graph, n):
                    if isinstance(m, Node) and m not in direct:
                        via.setdefault(m, n)
        lines.extend(f"  depends {m} via {via[m]}" for m in sorted(via, key=str))
        blocks.append("\n".join(lines) + "\n")
    return "".join(blocks)
