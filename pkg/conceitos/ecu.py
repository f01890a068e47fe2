"""
Entidades ECU e número de passos de expansão (NES).

Os caminhos comuns são removidos do grafo integrado; o grafo residual é
particionado em componentes fracamente conexos. Uma entidade CU que, dentro
do seu componente, alcança para baixo duas ou mais sementes é uma ECU, e seu
NES é a maior das menores distâncias até essas sementes.
"""
import json
import logging
from collections import defaultdict, deque
from dataclasses import dataclass

import networkx as nx

from .exporters import tsv_field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitionedGraph:
    nodes: tuple
    residual_edges: frozenset
    component: dict
    component_seeds: dict
    seeds: tuple

    @property
    def components(self):
        members = defaultdict(list)
        for node in self.nodes:
            members[self.component[node]].append(node)
        return dict(members)

    def isolated(self):
        """Nós sem nenhuma aresta residual."""
        touched = {node for edge in self.residual_edges for node in edge}
        return [node for node in self.nodes if node not in touched]


@dataclass(frozen=True)
class EcuRecord:
    entity: object
    component: int
    seeds: tuple
    distances: tuple
    nes: int

    @property
    def n(self):
        return len(self.seeds)


def compute_nes(distances):
    """NES = max(L_x); L_x vazio viola o contrato."""
    if not distances:
        raise ValueError('Conjunto de distâncias vazio: uma ECU precisa de ao menos uma semente')
    return max(distances)


def remove_common_paths(graph, common):
    """Remove os caminhos comuns e particiona o resíduo em componentes fracos."""
    residual = frozenset(edge for edge in graph.edge_support if edge not in common)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.support)
    digraph.add_edges_from(residual)
    components = sorted(
        (sorted(members) for members in nx.weakly_connected_components(digraph)),
        key=lambda members: members[0],
    )
    component = {}
    component_seeds = {}
    seeds = set(graph.seeds)
    for index, members in enumerate(components):
        for node in members:
            component[node] = index
        component_seeds[index] = tuple(node for node in members if node in seeds)
    logger.info(
        f'{len(common)} caminhos comuns removidos; {len(components)} componentes no resíduo'
    )
    return PartitionedGraph(
        nodes=tuple(sorted(graph.support)),
        residual_edges=residual,
        component=component,
        component_seeds=component_seeds,
        seeds=tuple(graph.seeds),
    )


def _downward_distances(start, children):
    distance = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for child in children.get(node, ()):
            if child not in distance:
                distance[child] = distance[node] + 1
                queue.append(child)
    return distance


def find_ecu(part, cu):
    """ECUs: entidades CU com duas ou mais sementes abaixo delas no componente."""
    children = defaultdict(list)
    for child, parent in part.residual_edges:
        children[parent].append(child)
    seeds = set(part.seeds)
    records = []
    for entity in sorted(cu.entities):
        if entity not in part.component:
            continue
        distance = _downward_distances(entity, children)
        reached = sorted(
            (node, d) for node, d in distance.items() if node in seeds and node != entity
        )
        if len(reached) < 2:
            continue
        lengths = tuple(d for _, d in reached)
        records.append(EcuRecord(
            entity=entity,
            component=part.component[entity],
            seeds=tuple(node for node, _ in reached),
            distances=lengths,
            nes=compute_nes(lengths),
        ))
    if not records:
        logger.warning('Nenhuma entidade ECU encontrada')
    else:
        logger.info(f'{len(records)} entidades ECU entre {len(cu)} entidades CU')
    return records


# -- persistência --------------------------------------------------------------

def dump_ecu(path, records, store):
    data = [
        {
            'entity': store.iri(record.entity),
            'label': store.label(record.entity),
            'component': record.component,
            'seeds': [store.iri(seed) for seed in record.seeds],
            'distances': list(record.distances),
            'nes': record.nes,
        }
        for record in records
    ]
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(data, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write('\n')


def load_ecu(path, store):
    with open(path, encoding='utf-8') as fh:
        data = json.load(fh)
    records = []
    for item in data:
        entity = store.id_of(item['entity'])
        if entity is None:
            raise ValueError(f'ECU ausente do snapshot: {item["entity"]}')
        records.append(EcuRecord(
            entity=entity,
            component=item['component'],
            seeds=tuple(store.id_of(seed) for seed in item['seeds']),
            distances=tuple(item['distances']),
            nes=item['nes'],
        ))
    return records


def write_ecu_table(path, records, store):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('entity\tlabel\tcomponent\tN\tnes\n')
        for record in records:
            fh.write(
                f'{store.iri(record.entity)}\t{tsv_field(store.label(record.entity))}\t'
                f'{record.component}\t{record.n}\t{record.nes}\n'
            )
