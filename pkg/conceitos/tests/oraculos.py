"""
Oráculos de força bruta, escritos sem reaproveitar o código testado.

Trabalham diretamente sobre a lista de arestas (filho, predicado, pai) com
nomes curtos, nunca sobre o store.
"""
from collections import defaultdict

import networkx as nx


def _parents(edges):
    up = defaultdict(set)
    for child, predicate, parent in edges:
        up[child].add((parent, predicate))
    return up


def upward_support(edges, seeds):
    """support[nó] e edge_support[(filho, pai)] por busca exaustiva em profundidade."""
    up = _parents(edges)
    support = defaultdict(set)
    edge_support = defaultdict(set)
    for seed in seeds:
        reached = {seed}
        trace_edges = set()

        def climb(node, first):
            for parent, predicate in up.get(node, ()):
                if not first and predicate != 'P279':
                    continue
                trace_edges.add((node, parent))
                if parent not in reached:
                    reached.add(parent)
                    climb(parent, False)

        climb(seed, True)
        for node in reached:
            support[node].add(seed)
        for edge in trace_edges:
            edge_support[edge].add(seed)
    return dict(support), dict(edge_support)


def cu_and_common(support, edge_support, threshold=2):
    cu = {node for node, seeds in support.items() if len(seeds) >= threshold}
    common = {
        (child, parent) for (child, parent), seeds in edge_support.items()
        if child in cu and parent in cu and len(seeds) >= 2
    }
    return cu, common


def components(nodes, edges):
    """Componentes fracos por união-busca."""
    leader = {node: node for node in nodes}

    def find(node):
        while leader[node] != node:
            leader[node] = leader[leader[node]]
            node = leader[node]
        return node

    for child, parent in edges:
        leader[find(child)] = find(parent)
    groups = defaultdict(set)
    for node in nodes:
        groups[find(node)].add(node)
    return [frozenset(group) for group in groups.values()]


def ecu_oracle(support, edge_support, seeds, threshold=2):
    """{ECU: {semente: distância}} usando caminhos mínimos do networkx no resíduo."""
    cu, common = cu_and_common(support, edge_support, threshold)
    residual = [edge for edge in edge_support if edge not in common]
    down = nx.DiGraph()
    down.add_nodes_from(support)
    down.add_edges_from((parent, child) for child, parent in residual)
    seeds = set(seeds)
    result = {}
    for node in cu:
        distances = nx.single_source_shortest_path_length(down, node)
        reached = {s: d for s, d in distances.items() if s in seeds and s != node}
        if len(reached) >= 2:
            result[node] = reached
    return result


def harvest_oracle(edges, ecu, nes):
    """{(candidato, raiz): menor profundidade} por conjuntos de passeios de comprimento k."""
    sub_children = defaultdict(set)
    any_children = defaultdict(set)
    for child, predicate, parent in edges:
        any_children[parent].add(child)
        if predicate == 'P279':
            sub_children[parent].add(child)
    found = {}
    for root in any_children[ecu]:
        walks = {root}
        classes = {root} if root in sub_children[ecu] else set()
        for k in range(1, nes + 1):
            for node in walks:
                if node != ecu:
                    found.setdefault((node, root), k)
            walks = {c for node in classes for c in any_children[node]}
            classes = {c for node in classes for c in sub_children[node]}
    return found


def upward_path_counts(edges, seeds):
    """Caminhos semente→nó por recursão memorizada sobre as arestas (somente DAGs)."""
    into = defaultdict(set)
    for child, predicate, parent in edges:
        into[parent].add((child, predicate))
    support, _ = upward_support(edges, seeds)
    totals = defaultdict(int)
    for seed in seeds:
        memo = {}

        def count(node):
            if node not in memo:
                sources = {
                    child for child, predicate in into.get(node, ())
                    if seed in support.get(child, ()) and (child == seed or predicate == 'P279')
                }
                memo[node] = int(node == seed) + sum(count(child) for child in sources)
            return memo[node]

        for node, reached_by in support.items():
            if seed in reached_by:
                totals[node] += count(node)
    return dict(totals)


def surviving_entities(nodes, edges, properties, adjacent, adjacency_predicates, property_blacklist):
    """Nós que passam pelas exclusões, decididos aresta a aresta."""
    survivors = set()
    for node in nodes:
        parents = [(parent, predicate) for child, predicate, parent in edges if child == node]
        if any(parent in adjacent and predicate in adjacency_predicates for parent, predicate in parents):
            continue
        if any(name == node and predicate in property_blacklist for name, predicate in properties):
            continue
        if parents:
            survivors.add(node)
    return survivors
