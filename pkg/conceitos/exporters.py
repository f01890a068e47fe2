"""
Exportação de grafos e candidatos: DOT, GraphML, TSV e JSON Lines.

Os grafos são montados como ``networkx.DiGraph`` com atributos escalares,
inseridos em ordem de IRI, e então serializados.
"""
import json
import logging

import networkx as nx

logger = logging.getLogger(__name__)

EXPORT_FORMATS = ('dot', 'graphml', 'tsv', 'jsonl')
EXPORT_SOURCES = ('graph', 'candidates')

CU_COLOR = 'lightblue'
ECU_COLOR = 'orange'


class UnknownFormatError(ValueError):
    def __init__(self, fmt):
        self.format = fmt
        super().__init__(
            f'Formato desconhecido: {fmt!r} (use um de: {", ".join(EXPORT_FORMATS)})'
        )


def tsv_field(value):
    """Campo seguro para TSV: tabulações e quebras de linha viram espaço."""
    return ' '.join(str(value).replace('\t', ' ').splitlines())


def _dot_quote(value):
    text = str(value).replace('\\', '\\\\').replace('"', '\\"').replace('\n', '\\n')
    return f'"{text}"'


def _dot_attrs(attrs):
    parts = []
    for key, value in sorted(attrs.items()):
        if isinstance(value, bool):
            value = 'true' if value else 'false'
        parts.append(f'{key}={_dot_quote(value)}')
    return ' [' + ', '.join(parts) + ']' if parts else ''


# -- grafos --------------------------------------------------------------------

def upper_digraph(graph, cu, common, store, ecus=()):
    """Grafo integrado anotado: sustentação, CU e ECU nos nós; sustentação e caminho comum nas arestas."""
    ecu_ids = {ecu.entity for ecu in ecus}
    digraph = nx.DiGraph(name='upper_graph')
    for node in sorted(graph.nodes, key=store.iri):
        digraph.add_node(
            store.iri(node),
            label=store.label(node),
            support=graph.support_count(node),
            paths=graph.paths.get(node, 0),
            cu=node in cu,
            ecu=node in ecu_ids,
        )
    for child, parent in sorted(graph.edges, key=lambda e: (store.iri(e[0]), store.iri(e[1]))):
        digraph.add_edge(
            store.iri(child),
            store.iri(parent),
            support=len(graph.edge_support[(child, parent)]),
            common=(child, parent) in common,
            predicates=','.join(sorted(graph.edge_predicates.get((child, parent), ()))),
        )
    return digraph


def residual_digraph(part, ecus, store):
    """Grafo residual após a remoção dos caminhos comuns, com o componente de cada nó."""
    ecu_ids = {ecu.entity for ecu in ecus}
    seeds = set(part.seeds)
    digraph = nx.DiGraph(name='residual_graph')
    for node in sorted(part.nodes, key=store.iri):
        digraph.add_node(
            store.iri(node),
            label=store.label(node),
            component=part.component[node],
            seed=node in seeds,
            ecu=node in ecu_ids,
        )
    for child, parent in sorted(part.residual_edges, key=lambda e: (store.iri(e[0]), store.iri(e[1]))):
        digraph.add_edge(store.iri(child), store.iri(parent))
    return digraph


def candidate_digraph(candidates, store):
    """Árvores coletadas: cada candidato ligado aos pais registrados na proveniência."""
    digraph = nx.DiGraph(name='candidates')
    for entity in sorted(candidates, key=store.iri):
        candidate = candidates[entity]
        digraph.add_node(
            store.iri(entity),
            label=store.label(entity),
            depth=candidate.depth,
            min_nes=candidate.min_nes,
            kept_by=','.join(sorted(candidate.kept_by)),
        )
    edges = sorted({
        (store.iri(entity), store.iri(parent))
        for entity, candidate in candidates.items()
        for p in candidate.provenance for parent in (*p.parents, *p.links)
    })
    for child, parent in edges:
        if parent not in digraph:
            digraph.add_node(parent, label=store.label(store.id_of(parent)))
        digraph.add_edge(child, parent)
    return digraph


# -- escritores ----------------------------------------------------------------

def write_dot(digraph, path):
    lines = [f'digraph {_dot_quote(digraph.graph.get("name", "G"))} {{', '  rankdir=BT;']
    for node, attrs in digraph.nodes(data=True):
        attrs = dict(attrs)
        if attrs.get('ecu'):
            attrs.update(style='filled', fillcolor=ECU_COLOR)
        elif attrs.get('cu'):
            attrs.update(style='filled', fillcolor=CU_COLOR)
        lines.append(f'  {_dot_quote(node)}{_dot_attrs(attrs)};')
    for child, parent, attrs in digraph.edges(data=True):
        attrs = dict(attrs)
        if attrs.get('common'):
            attrs['style'] = 'bold'
        lines.append(f'  {_dot_quote(child)} -> {_dot_quote(parent)}{_dot_attrs(attrs)};')
    lines.append('}')
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('\n'.join(lines) + '\n')


def write_graphml(digraph, path):
    nx.write_graphml(digraph, path, encoding='utf-8')


def write_edge_tsv(digraph, path):
    keys = sorted({key for _, _, attrs in digraph.edges(data=True) for key in attrs})
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('\t'.join(['child', 'parent', *keys]) + '\n')
        for child, parent, attrs in digraph.edges(data=True):
            row = [child, parent, *(attrs.get(key, '') for key in keys)]
            fh.write('\t'.join(tsv_field(value) for value in row) + '\n')


def write_jsonl(records, path):
    count = 0
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write('\n')
            count += 1
    return count


def digraph_records(digraph):
    for node, attrs in digraph.nodes(data=True):
        yield {'type': 'node', 'id': node, **attrs}
    for child, parent, attrs in digraph.edges(data=True):
        yield {'type': 'edge', 'source': child, 'target': parent, **attrs}


def export_digraph(digraph, fmt, path):
    """Serializa ``digraph`` no formato pedido."""
    if fmt not in EXPORT_FORMATS:
        raise UnknownFormatError(fmt)
    if fmt == 'dot':
        write_dot(digraph, path)
    elif fmt == 'graphml':
        write_graphml(digraph, path)
    elif fmt == 'tsv':
        write_edge_tsv(digraph, path)
    else:
        write_jsonl(digraph_records(digraph), path)
    logger.info(
        f'{digraph.number_of_nodes()} nós e {digraph.number_of_edges()} arestas exportados '
        f'em {fmt} para {path}'
    )
    return path


def write_candidate_tsv(candidates, store, path):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('iri\tlabel\tdepth\tminNes\tecus\tkeptBy\n')
        for entity in sorted(candidates, key=store.iri):
            candidate = candidates[entity]
            ecus = ','.join(sorted(store.iri(ecu) for ecu in candidate.ecus))
            row = [
                store.iri(entity), store.label(entity), candidate.depth, candidate.min_nes,
                ecus, ','.join(sorted(candidate.kept_by)),
            ]
            fh.write('\t'.join(tsv_field(value) for value in row) + '\n')
