"""
Coleta de conceitos inferiores a partir das ECUs.

Para cada ECU e k = 1..NES, são coletadas as entidades alcançáveis por k-1
passos inversos de subClassOf seguidos de um passo inverso de subClassOf ou
instanceOf. instanceOf só aparece no último passo: uma instância encontrada
não é expandida. A busca é feita no store completo, separadamente para cada
filho direto da ECU, de modo que cada candidato saiba sob qual subárvore foi
encontrado.
"""
import json
import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from .triplestore import DOWN

logger = logging.getLogger(__name__)

CANDIDATES_SCHEMA = 2


class Provenance(NamedTuple):
    ecu: int
    depth: int
    subtree_root: int
    nes: int
    parents: tuple = ()
    links: tuple = ()


@dataclass
class ConceptCandidate:
    entity: int
    provenance: list = field(default_factory=list)
    kept_by: frozenset = frozenset()

    @property
    def depth(self):
        return min(p.depth for p in self.provenance)

    @property
    def min_nes(self):
        """Menor NES entre as ECUs que encontraram o candidato."""
        return min(p.nes for p in self.provenance)

    @property
    def ecus(self):
        return sorted({p.ecu for p in self.provenance})


@dataclass
class SubtreeHarvest:
    """Resultado da busca sob um filho direto da ECU.

    ``depth`` guarda a menor profundidade de cada nó; ``parents`` os nós de
    classe do nível anterior que levam a ele; ``links`` as demais classes
    coletadas das quais o nó também é filho direto.
    """
    root: int
    depth: dict
    parents: dict
    links: dict = field(default_factory=dict)

    def children(self):
        mapping = defaultdict(list)
        for node, parents in self.parents.items():
            for parent in (*parents, *self.links.get(node, ())):
                mapping[parent].append(node)
        return mapping


@dataclass
class EcuHarvest:
    ecu: object
    subtrees: list

    @property
    def candidates(self):
        found = {}
        for subtree in self.subtrees:
            for node, depth in subtree.depth.items():
                candidate = found.setdefault(node, ConceptCandidate(node))
                candidate.provenance.append(Provenance(
                    self.ecu.entity, depth, subtree.root, self.ecu.nes, subtree.parents[node],
                    subtree.links.get(node, ()),
                ))
        return found


def _children_by_role(store, node, predicates):
    found = set()
    for predicate in predicates:
        found.update(store.row(node, DOWN, predicate).tolist())
    return found


def _expand_root(ecu_entity, root, is_class, nes, store, subclass, instance):
    depth = {root: 1}
    parents = {root: (ecu_entity,)}
    class_seen = {root} if is_class else set()
    frontier = [root] if is_class else []
    level = 1
    while frontier and level < nes:
        via_class = defaultdict(set)
        via_instance = defaultdict(set)
        for node in frontier:
            for child in _children_by_role(store, node, subclass):
                via_class[child].add(node)
            for child in _children_by_role(store, node, instance):
                via_instance[child].add(node)
        level += 1
        following = []
        for child in sorted(set(via_class) | set(via_instance)):
            if child == ecu_entity:
                continue
            if child not in depth:
                depth[child] = level
                parents[child] = tuple(sorted(
                    via_class.get(child, set()) | via_instance.get(child, set())
                ))
            if child in via_class and child not in class_seen:
                class_seen.add(child)
                following.append(child)
        frontier = following
    links = defaultdict(set)
    for node in class_seen:
        for child in _children_by_role(store, node, (*subclass, *instance)):
            if child in depth and child not in (ecu_entity, node) and node not in parents[child]:
                links[child].add(node)
    return SubtreeHarvest(
        root, depth, parents, {child: tuple(sorted(nodes)) for child, nodes in links.items()}
    )


def expand_down(ecu, store, nes=None):
    """Expande uma ECU até ``nes`` passos (padrão: o NES da própria ECU)."""
    nes = ecu.nes if nes is None else nes
    if nes < 1:
        raise ValueError('NES deve ser >= 1')
    subclass = sorted(store.filter.subclass_predicates)
    instance = sorted(store.filter.instance_predicates)
    class_roots = _children_by_role(store, ecu.entity, subclass)
    instance_roots = _children_by_role(store, ecu.entity, instance) - class_roots
    subtrees = []
    for root in sorted((class_roots | instance_roots) - {ecu.entity}):
        subtrees.append(_expand_root(
            ecu.entity, root, root in class_roots, nes, store, subclass, instance
        ))
    return EcuHarvest(ecu, subtrees)


# -- SPARQL --------------------------------------------------------------------

_LOCAL_NAME = re.compile(r'[A-Za-z0-9_][A-Za-z0-9_\-]*')


def compact_iri(iri, prefixes):
    for prefix, namespace in sorted(prefixes.items()):
        local = iri[len(namespace):]
        if iri.startswith(namespace) and _LOCAL_NAME.fullmatch(local):
            return f'{prefix}:{local}', prefix
    return f'<{iri}>', None


def _inverse_step(predicates, prefixes, used):
    names = []
    for predicate in sorted(predicates):
        name, prefix = compact_iri(predicate, prefixes)
        if prefix:
            used.add(prefix)
        names.append(name)
    if len(names) == 1:
        return f'^{names[0]}'
    return '^(' + '|'.join(names) + ')'


def emit_sparql(ecu_iri, k, ingest_filter, prefixes=None):
    """Consulta SELECT equivalente ao passo k (somente texto, nunca executada)."""
    if k < 1:
        raise ValueError('k deve ser >= 1')
    prefixes = prefixes or {}
    used = set()
    interior = _inverse_step(ingest_filter.subclass_predicates, prefixes, used)
    terminal = _inverse_step(ingest_filter.hierarchy_predicates, prefixes, used)
    path = '/'.join([interior] * (k - 1) + [terminal])
    anchor, prefix = compact_iri(ecu_iri, prefixes)
    if prefix:
        used.add(prefix)
    lines = [f'PREFIX {name}: <{prefixes[name]}>' for name in sorted(used)]
    lines += [
        'SELECT DISTINCT ?concept WHERE {',
        f'  {anchor} {path} ?concept .',
        '}',
    ]
    return '\n'.join(lines) + '\n'


# -- fusão e estatísticas --------------------------------------------------------

@dataclass
class HarvestReport:
    per_ecu: dict
    ecus_by_nes: dict
    unique_by_nes: dict
    cumulative_by_nes: dict
    total_unique: int


def harvest_statistics(candidates, ecus):
    """ECUs por NES, conceitos únicos por NES e acumulado até cada NES."""
    ecus_by_nes = Counter(ecu.nes for ecu in ecus)
    by_nes = defaultdict(set)
    for entity, candidate in candidates.items():
        for nes in {p.nes for p in candidate.provenance}:
            by_nes[nes].add(entity)
    levels = sorted(set(ecus_by_nes) | set(by_nes))
    min_nes = Counter(candidate.min_nes for candidate in candidates.values())
    cumulative = {}
    running = 0
    for nes in range(1, (levels[-1] if levels else 0) + 1):
        running += min_nes.get(nes, 0)
        cumulative[nes] = running
    return (
        {nes: ecus_by_nes.get(nes, 0) for nes in levels},
        {nes: len(by_nes.get(nes, ())) for nes in levels},
        cumulative,
    )


def merge_harvests(harvests):
    """Deduplica candidatos entre ECUs, unindo as proveniências."""
    merged = {}
    per_ecu = {}
    for harvest in harvests:
        found = harvest.candidates
        per_ecu[harvest.ecu.entity] = dict(sorted(Counter(c.depth for c in found.values()).items()))
        for entity, candidate in found.items():
            target = merged.setdefault(entity, ConceptCandidate(entity))
            target.provenance.extend(candidate.provenance)
    for candidate in merged.values():
        candidate.provenance.sort()
    ecus_by_nes, unique_by_nes, cumulative = harvest_statistics(
        merged, [h.ecu for h in harvests]
    )
    report = HarvestReport(per_ecu, ecus_by_nes, unique_by_nes, cumulative, len(merged))
    logger.info(f'{len(merged):,} conceitos únicos coletados de {len(harvests)} ECUs')
    return dict(sorted(merged.items())), report


def write_harvest_report(path, report, store, trimmed=None):
    """TSV com as séries por NES; ``trimmed`` acrescenta as colunas pós-poda."""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        header = ['nes', 'ecuCount', 'uniqueConcepts', 'cumulativeUnique']
        if trimmed is not None:
            header += ['trimmedUnique', 'trimmedCumulative']
        fh.write('\t'.join(header) + '\n')
        levels = sorted(set(report.ecus_by_nes) | set(report.cumulative_by_nes))
        for nes in levels:
            row = [
                nes, report.ecus_by_nes.get(nes, 0), report.unique_by_nes.get(nes, 0),
                report.cumulative_by_nes.get(nes, 0),
            ]
            if trimmed is not None:
                _, unique, cumulative = trimmed
                row += [unique.get(nes, 0), cumulative.get(nes, 0)]
            fh.write('\t'.join(map(str, row)) + '\n')
        fh.write('\n')
        fh.write('ecu\tdepth\tcount\n')
        for ecu, depths in sorted(report.per_ecu.items()):
            for depth, count in depths.items():
                fh.write(f"{store.iri(ecu)}\t{depth}\t{count}\n")
        fh.write(f'(total)\t\t{report.total_unique}\n')


# -- JSON Lines ----------------------------------------------------------------

def _provenance_record(p, store):
    entry = {
        'ecu': store.iri(p.ecu),
        'depth': p.depth,
        'subtreeRoot': store.iri(p.subtree_root),
        'nes': p.nes,
        'parents': [store.iri(parent) for parent in p.parents],
    }
    if p.links:
        entry['links'] = [store.iri(link) for link in p.links]
    return entry


def candidate_record(candidate, store):
    record = {
        'iri': store.iri(candidate.entity),
        'labels': store.labels(candidate.entity),
        'provenance': [_provenance_record(p, store) for p in candidate.provenance],
    }
    if candidate.kept_by:
        record['keptBy'] = sorted(candidate.kept_by)
    return record


def write_candidates(path, candidates, store):
    """Um registro JSON por linha, em ordem de IRI."""
    records = sorted(
        (candidate_record(c, store) for c in candidates.values()), key=lambda r: r['iri']
    )
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write('\n')
    return len(records)


def read_candidates(path, store):
    candidates = {}
    with open(path, encoding='utf-8') as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            entity = store.id_of(record['iri'])
            if entity is None:
                raise ValueError(f'Candidato ausente do snapshot: {record["iri"]}')
            provenance = [
                Provenance(
                    store.id_of(p['ecu']), p['depth'], store.id_of(p['subtreeRoot']), p['nes'],
                    tuple(store.id_of(parent) for parent in p.get('parents', ())),
                    tuple(store.id_of(link) for link in p.get('links', ())),
                )
                for p in record['provenance']
            ]
            candidates[entity] = ConceptCandidate(
                entity, provenance, frozenset(record.get('keptBy', ()))
            )
    return candidates


def harvests_from_candidates(candidates, ecus):
    """Reconstrói as subárvores por ECU a partir da proveniência gravada."""
    by_ecu = {ecu.entity: ecu for ecu in ecus}
    layout = defaultdict(lambda: defaultdict(lambda: ({}, {}, {})))
    for entity, candidate in candidates.items():
        for p in candidate.provenance:
            depth, parents, links = layout[p.ecu][p.subtree_root]
            depth[entity] = p.depth
            parents[entity] = p.parents
            if p.links:
                links[entity] = p.links
    harvests = []
    for ecu_entity in sorted(by_ecu):
        roots = layout.get(ecu_entity, {})
        subtrees = [SubtreeHarvest(root, *map(dict, roots[root])) for root in sorted(roots)]
        harvests.append(EcuHarvest(by_ecu[ecu_entity], subtrees))
    return harvests
