"""
Grafo de conceitos superiores.

Cada entidade de busca é rastreada para cima: o primeiro salto usa
subClassOf ou instanceOf, os seguintes apenas subClassOf. Os rastros são
integrados em um único grafo em que cada nó e aresta sabe quais sementes o
sustentam; daí saem as entidades CU e os caminhos comuns.
"""
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import partial

import networkx as nx

from .triplestore import UP

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 30


@dataclass(frozen=True)
class UpwardTrace:
    seed: object
    depth: dict
    edges: frozenset
    truncated: int = 0

    @property
    def nodes(self):
        return frozenset(self.depth)


def trace_upward(seed, store, max_depth=DEFAULT_MAX_DEPTH):
    """Busca em largura para cima a partir de uma semente, segura contra ciclos."""
    if max_depth < 1:
        raise ValueError('max_depth deve ser >= 1')
    first_hop = sorted(store.filter.hierarchy_predicates)
    later_hops = sorted(store.filter.subclass_predicates)
    depth = {seed: 0}
    edges = set()
    frontier = [seed]
    level = 0
    truncated = set()
    while frontier:
        predicates = first_hop if level == 0 else later_hops
        if level == max_depth:
            for node in frontier:
                for predicate in predicates:
                    truncated.update(
                        parent for parent in store.row(node, UP, predicate).tolist()
                        if parent not in depth
                    )
            break
        following = []
        for node in frontier:
            for predicate in predicates:
                for parent in store.row(node, UP, predicate).tolist():
                    edges.add((node, parent, predicate))
                    if parent not in depth:
                        depth[parent] = level + 1
                        following.append(parent)
        frontier = following
        level += 1
    if truncated:
        logger.warning(
            f'Rastro de {store.iri(seed)} truncado em {max_depth} saltos; '
            f'{len(truncated)} nós acima do limite omitidos'
        )
    return UpwardTrace(seed, depth, frozenset(edges), len(truncated))


def _path_counts(trace):
    """Número de caminhos da semente até cada nó do rastro.

    Ciclos são contraídos num único nó, que herda a contagem do componente.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(trace.depth)
    graph.add_edges_from((child, parent) for child, parent, _ in trace.edges)
    condensed = nx.condensation(graph)
    component = condensed.graph['mapping']
    counts = Counter({component[trace.seed]: 1})
    for group in nx.topological_sort(condensed):
        for following in condensed.successors(group):
            counts[following] += counts[group]
    return Counter({node: counts[component[node]] for node in trace.depth})


@dataclass
class IntegratedGraph:
    seeds: tuple
    support: dict
    edge_support: dict
    edge_predicates: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    truncated: int = 0

    @property
    def nodes(self):
        return sorted(self.support)

    @property
    def edges(self):
        return sorted(self.edge_support)

    def support_count(self, node):
        return len(self.support.get(node, ()))

    def path_counts(self):
        """Caminhos semente→nó somados sobre todas as sementes."""
        return dict(self.paths)


def integrate(traces):
    """União dos rastros com os conjuntos de sementes de sustentação."""
    support = defaultdict(set)
    edge_support = defaultdict(set)
    edge_predicates = defaultdict(set)
    paths = Counter()
    seeds = set()
    truncated = 0
    for trace in traces:
        seeds.add(trace.seed)
        truncated += trace.truncated
        for node in trace.depth:
            support[node].add(trace.seed)
        for child, parent, predicate in trace.edges:
            edge_support[(child, parent)].add(trace.seed)
            edge_predicates[(child, parent)].add(predicate)
        paths.update(_path_counts(trace))
    return IntegratedGraph(
        seeds=tuple(sorted(seeds)),
        support={node: frozenset(s) for node, s in support.items()},
        edge_support={edge: frozenset(s) for edge, s in edge_support.items()},
        edge_predicates={edge: frozenset(p) for edge, p in edge_predicates.items()},
        paths=dict(paths),
        truncated=truncated,
    )


@dataclass(frozen=True)
class CuSet:
    entities: frozenset
    threshold: int = 2

    def __contains__(self, node):
        return node in self.entities

    def __len__(self):
        return len(self.entities)

    def __iter__(self):
        return iter(sorted(self.entities))


@dataclass(frozen=True)
class CommonPathSet:
    edges: frozenset

    def __contains__(self, edge):
        return edge in self.edges

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))


def find_cu(graph, threshold=2):
    """Nós sustentados por ao menos ``threshold`` sementes distintas."""
    return CuSet(
        frozenset(node for node, seeds in graph.support.items() if len(seeds) >= threshold),
        threshold,
    )


def find_common_paths(graph, cu, min_support=2):
    """Arestas CU→CU cuja duplicação foi observada (sustentação >= min_support)."""
    return CommonPathSet(frozenset(
        (child, parent) for (child, parent), seeds in graph.edge_support.items()
        if child in cu and parent in cu and len(seeds) >= min_support
    ))


def trace_all(seeds, store, max_depth=DEFAULT_MAX_DEPTH, executor=None):
    """Rastreia todas as sementes; ``executor`` opcional preserva a ordem."""
    trace = partial(trace_upward, store=store, max_depth=max_depth)
    if executor is None:
        return [trace(seed) for seed in seeds]
    return list(executor.map(trace, seeds))


# -- persistência --------------------------------------------------------------

def dump_upper_graph(path, graph, cu, common, store):
    """Grava o grafo integrado em JSON (IRIs, ordem determinística)."""
    iri = store.iri
    data = {
        'seeds': [iri(s) for s in graph.seeds],
        'cu_threshold': cu.threshold,
        'truncated': graph.truncated,
        'nodes': [
            {
                'iri': iri(node),
                'support': sorted(iri(s) for s in graph.support[node]),
                'paths': graph.paths.get(node, 0),
                'cu': node in cu,
            }
            for node in graph.nodes
        ],
        'edges': [
            {
                'child': iri(child),
                'parent': iri(parent),
                'predicates': sorted(graph.edge_predicates.get((child, parent), ())),
                'support': sorted(iri(s) for s in graph.edge_support[(child, parent)]),
                'common': (child, parent) in common,
            }
            for child, parent in graph.edges
        ],
    }
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(data, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write('\n')


def load_upper_graph(path, store):
    """Inverso de ``dump_upper_graph``; exige o mesmo snapshot."""
    with open(path, encoding='utf-8') as fh:
        data = json.load(fh)

    def ident(iri):
        index = store.id_of(iri)
        if index is None:
            raise ValueError(f'Entidade do grafo ausente do snapshot: {iri}')
        return index

    support = {
        ident(node['iri']): frozenset(map(ident, node['support'])) for node in data['nodes']
    }
    edge_support = {}
    edge_predicates = {}
    common = set()
    for edge in data['edges']:
        key = (ident(edge['child']), ident(edge['parent']))
        edge_support[key] = frozenset(map(ident, edge['support']))
        edge_predicates[key] = frozenset(edge['predicates'])
        if edge['common']:
            common.add(key)
    graph = IntegratedGraph(
        seeds=tuple(sorted(map(ident, data['seeds']))),
        support=support,
        edge_support=edge_support,
        edge_predicates=edge_predicates,
        paths={ident(node['iri']): node['paths'] for node in data['nodes']},
        truncated=data['truncated'],
    )
    cu = CuSet(
        frozenset(ident(node['iri']) for node in data['nodes'] if node['cu']),
        data['cu_threshold'],
    )
    return graph, cu, CommonPathSet(frozenset(common))
