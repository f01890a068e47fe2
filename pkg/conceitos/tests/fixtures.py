"""Grafos pequenos usados em vários testes (F0, G1, G2, G3) e utilitários de montagem."""
import random
from pathlib import Path

from conceitos.ecu import EcuRecord
from conceitos.triplestore import HierStoreBuilder, IngestFilter, ingest, iter_lines

WD = 'http://www.wikidata.org/entity/'
WDT = 'http://www.wikidata.org/prop/direct/'
RDFS_LABEL = 'http://www.w3.org/2000/01/rdf-schema#label'
SKOS_ALT_LABEL = 'http://www.w3.org/2004/02/skos/core#altLabel'
P279 = WDT + 'P279'
P31 = WDT + 'P31'
P131 = WDT + 'P131'
P21 = WDT + 'P21'
PREFIXES = {'wd': WD, 'wdt': WDT}

PREDICATES = {'P279': P279, 'P31': P31, 'P131': P131, 'P21': P21}


def iri(name):
    return WD + name


def make_filter(languages=('ja',), extra=(P131, P21), **kwargs):
    return IngestFilter(
        subclass_predicates={P279},
        instance_predicates={P31},
        representative_label_predicates={RDFS_LABEL},
        alias_label_predicates={SKOS_ALT_LABEL},
        languages=languages,
        extra_predicates=extra,
        **kwargs,
    )


F0 = '\n'.join([
    f'<{iri("Q1")}> <{P279}> <{iri("Q2")}> .',
    f'<{iri("Q1")}> <{P31}> <{iri("Q3")}> .',
    f'<{iri("Q1")}> <{RDFS_LABEL}> "poly"@ja .',
    f'<{iri("Q1")}> <{SKOS_ALT_LABEL}> "pol"@ja .',
    f'<{iri("Q9")}> <http://example.org/unrelated> <{iri("Q2")}> .',
]) + '\n'


def nt_text(edges=(), labels=(), aliases=(), properties=(), language='ja'):
    """N-Triples a partir de nomes curtos: arestas (filho, 'P279'|'P31', pai)."""
    lines = []
    for child, predicate, parent in edges:
        lines.append(f'<{iri(child)}> <{PREDICATES[predicate]}> <{iri(parent)}> .')
    for name, text in labels:
        lines.append(f'<{iri(name)}> <{RDFS_LABEL}> "{text}"@{language} .')
    for name, text in aliases:
        lines.append(f'<{iri(name)}> <{SKOS_ALT_LABEL}> "{text}"@{language} .')
    for name, predicate, value in properties:
        lines.append(f'<{iri(name)}> <{PREDICATES[predicate]}> <{iri(value)}> .')
    return '\n'.join(lines) + '\n' if lines else ''


def build_store(edges=(), labels=(), aliases=(), properties=(), languages=('ja',)):
    text = nt_text(edges, labels, aliases, properties)
    return ingest(iter_lines(text), make_filter(languages))


def f0_store(languages=('ja',)):
    return ingest(iter_lines(F0), make_filter(languages))


def ids(store, *names):
    return tuple(store.id_of(iri(name)) for name in names)


def names(store, entities):
    return {store.iri(entity)[len(WD):] for entity in entities}


def ecu_record(store, name, nes, seeds=()):
    """Registro de ECU montado à mão (para coleta e poda)."""
    seed_ids = ids(store, *seeds)
    return EcuRecord(
        entity=store.id_of(iri(name)),
        component=0,
        seeds=seed_ids,
        distances=tuple(1 for _ in seed_ids),
        nes=nes,
    )


# G1: dois caminhos que se juntam em A e outro que chega a B por instanceOf
G1_EDGES = [
    ('S1', 'P279', 'A'),
    ('S2', 'P279', 'A'),
    ('A', 'P279', 'B'),
    ('S3', 'P31', 'C'),
    ('C', 'P279', 'B'),
    ('B', 'P279', 'R'),
]
G1_SEEDS = ('S1', 'S2', 'S3')

# G2: E ← X ← s (semente), E ← Y ← t (sem sementes)
G2_EDGES = [
    ('X', 'P279', 'E'),
    ('s', 'P279', 'X'),
    ('Y', 'P279', 'E'),
    ('t', 'P279', 'Y'),
]

# G3: E ← X ← Y ← s, ramo irmão E ← Z ← W sem sementes
G3_EDGES = [
    ('X', 'P279', 'E'),
    ('Y', 'P279', 'X'),
    ('s', 'P279', 'Y'),
    ('Z', 'P279', 'E'),
    ('W', 'P279', 'Z'),
]

# E ← X ← Y ← Z ← s, com N filho de X e também de Z
SHORTCUT_EDGES = [
    ('X', 'P279', 'E'),
    ('Y', 'P279', 'X'),
    ('N', 'P279', 'X'),
    ('Z', 'P279', 'Y'),
    ('s', 'P279', 'Z'),
    ('N', 'P279', 'Z'),
]


def random_dag(rng, max_nodes, max_parents=3, instance_ratio=0.3):
    """DAG aleatório: o nó i só aponta para pais de índice menor."""
    size = rng.randint(2, max_nodes)
    edges = set()
    for child in range(1, size):
        for _ in range(rng.randint(0, max_parents)):
            parent = rng.randrange(child)
            predicate = 'P31' if rng.random() < instance_ratio else 'P279'
            edges.add((f'N{child}', predicate, f'N{parent}'))
    return size, sorted(edges)


def store_from_edges(edges):
    """Monta o store direto pelo builder, sem passar por texto."""
    builder = HierStoreBuilder(make_filter())
    for child, predicate, parent in edges:
        builder.add_edge(iri(child), PREDICATES[predicate], iri(parent))
    return builder.build()


def random_instance(seed, max_nodes=50, max_seeds=8):
    rng = random.Random(seed)
    size, edges = random_dag(rng, max_nodes)
    store = store_from_edges(edges)
    present = sorted({name for edge in edges for name in (edge[0], edge[2])})
    seeds = rng.sample(present, min(len(present), rng.randint(1, max_seeds))) if present else []
    return rng, store, edges, seeds


G1_LABELS = [(name, name.lower()) for name in ('S1', 'S2', 'S3', 'A', 'B', 'C', 'R')]


def write_g1_bundle(directory):
    """Dump, termos e gabarito do G1 em ``directory``; devolve os caminhos."""
    directory = Path(directory)
    paths = {
        'dump': directory / 'g1.nt',
        'terms': directory / 'termos.txt',
        'ground_truth': directory / 'gabarito.txt',
    }
    paths['dump'].write_text(nt_text(G1_EDGES, G1_LABELS), encoding='utf-8')
    paths['terms'].write_text('s1\ns2\ns3\n', encoding='utf-8')
    paths['ground_truth'].write_text('s1\na\nzzz\n', encoding='utf-8')
    return paths


def random_linker_instance(seed, max_nodes=40):
    """DAG aleatório com propriedades P131/P21 em alguns nós e nós isolados."""
    rng = random.Random(seed)
    size, edges = random_dag(rng, max_nodes)
    properties = sorted(
        (f'N{i}', rng.choice(('P131', 'P21'))) for i in range(size) if rng.random() < 0.3
    )
    builder = HierStoreBuilder(make_filter())
    for index in range(size):
        builder.intern(iri(f'N{index}'))
    for child, predicate, parent in edges:
        builder.add_edge(iri(child), PREDICATES[predicate], iri(parent))
    for name, predicate in properties:
        builder.add_property(iri(name), PREDICATES[predicate])
    return rng, builder.build(), size, edges, properties
