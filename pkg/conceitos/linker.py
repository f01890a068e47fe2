"""
Ligação de termos do domínio a entidades do LOD.

Correspondência lexical exata (rótulo representativo ou alias) seguida dos
dois modelos de exclusão: entidades adjacentes a uma entidade da lista negra
e entidades sujeito de um predicado da lista negra. Só sobrevivem entidades
com aresta de saída na hierarquia (subClassOf ou instanceOf).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from django.core.exceptions import ValidationError

from .exporters import tsv_field
from .triplestore import LABEL_KINDS, UP, normalize_label

logger = logging.getLogger(__name__)

KEPT = 'kept'
EXCLUDED = 'excluded'
UNMATCHED = 'unmatched'

ADJACENT_BLACKLIST = 'adjacent-blacklist'
PROPERTY_BLACKLIST = 'property-blacklist'
NO_HIERARCHY = 'no-hierarchy-membership'


class TermListError(ValueError):
    pass


@dataclass(frozen=True)
class TermList:
    terms: tuple
    provenance: str = ''

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.terms


def load_terms(lines, provenance='', case_fold=False, allow_empty=False):
    """Uma linha por termo; linhas iniciadas por ``#`` são comentários.

    Normaliza, remove vazios e duplicatas preservando a ordem.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    terms = []
    seen = set()
    for line in lines:
        if line.strip().startswith('#'):
            continue
        term = normalize_label(line, case_fold)
        if term and term not in seen:
            seen.add(term)
            terms.append(term)
    if not terms and not allow_empty:
        raise TermListError(f'Lista de termos vazia: {provenance or "(sem nome)"}')
    return TermList(tuple(terms), provenance)


def load_terms_file(path, case_fold=False, allow_empty=False):
    path = Path(path)
    text = path.read_text(encoding='utf-8-sig')
    return load_terms(text, provenance=path.name, case_fold=case_fold, allow_empty=allow_empty)


def _is_iri(value):
    scheme, sep, rest = value.partition(':')
    return bool(sep and scheme and rest) and not any(c.isspace() for c in value)


@dataclass(frozen=True)
class ExclusionPolicy:
    adjacent_blacklist: frozenset = frozenset()
    adjacency_predicates: frozenset = frozenset()
    property_blacklist: frozenset = frozenset()

    def __post_init__(self):
        for name in ('adjacent_blacklist', 'adjacency_predicates', 'property_blacklist'):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    def clean(self):
        for name in ('adjacent_blacklist', 'adjacency_predicates', 'property_blacklist'):
            invalid = sorted(iri for iri in getattr(self, name) if not _is_iri(iri))
            if invalid:
                raise ValidationError({name: f'IRIs inválidas: {invalid}'})


class AuditRow(NamedTuple):
    term: str
    entity: int | None
    status: str
    reason: str = ''
    detail: str = ''


@dataclass
class SearchEntitySet:
    """Entidades de busca por termo, com trilha de auditoria completa."""
    entries: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)

    @property
    def seeds(self):
        return tuple(sorted({e for entities in self.entries.values() for e in entities}))

    def __contains__(self, entity):
        return any(entity in entities for entities in self.entries.values())

    def __len__(self):
        return len(self.seeds)

    def audit_for(self, term):
        return [row for row in self.audit if row.term == term]


def _link_one(term, store, kinds):
    return term, store.lookup_label(term, kinds)


def link_terms(terms, store, kinds=LABEL_KINDS, workers=1):
    """Mapa termo → entidades com rótulo idêntico (ainda sem exclusões)."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(lambda term: _link_one(term, store, kinds), terms))
    candidates = dict(results)
    unmatched = sum(1 for entities in candidates.values() if not entities)
    logger.info(
        f'{len(candidates)} termos ligados; {unmatched} sem correspondência no LOD'
    )
    return candidates


def _exclusion_reason(entity, policy, blacklist_ids, store):
    for predicate in sorted(policy.adjacency_predicates):
        hits = [p for p in store.neighbors(entity, UP, {predicate}) if p in blacklist_ids]
        if hits:
            return ADJACENT_BLACKLIST, f'{predicate} {store.iri(hits[0])}'
    for predicate in sorted(policy.property_blacklist):
        if store.has_property(entity, predicate):
            return PROPERTY_BLACKLIST, predicate
    if not store.neighbors(entity, UP):
        return NO_HIERARCHY, ''
    return None, ''


def apply_exclusions(candidates, policy, store):
    """Aplica os modelos de exclusão; o primeiro motivo encontrado é registrado.

    A adjacência só é testada com o candidato como sujeito.
    """
    blacklist_ids = {
        index for index in map(store.id_of, policy.adjacent_blacklist) if index is not None
    }
    result = SearchEntitySet()
    for term, entities in candidates.items():
        if not entities:
            result.entries[term] = ()
            result.audit.append(AuditRow(term, None, UNMATCHED, UNMATCHED))
            continue
        survivors = []
        for entity in sorted(entities):
            reason, detail = _exclusion_reason(entity, policy, blacklist_ids, store)
            if reason is None:
                survivors.append(entity)
                result.audit.append(AuditRow(term, entity, KEPT))
            else:
                result.audit.append(AuditRow(term, entity, EXCLUDED, reason, detail))
        result.entries[term] = tuple(survivors)
    excluded = sum(1 for row in result.audit if row.status == EXCLUDED)
    logger.info(f'{len(result.seeds)} entidades de busca; {excluded} candidatos excluídos')
    return result


def write_search_entities(entity_set, store, path):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('term\tentity\tstatus\treason\tdetail\n')
        for row in entity_set.audit:
            iri = store.iri(row.entity) if row.entity is not None else ''
            fh.write(f'{tsv_field(row.term)}\t{iri}\t{row.status}\t{row.reason}\t{row.detail}\n')


def write_seeds(entity_set, store, path):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for seed in entity_set.seeds:
            fh.write(f'{store.iri(seed)}\n')


def read_seeds(path, store):
    """Lê o arquivo plano de sementes; IRIs ausentes do store são ignoradas."""
    seeds = []
    for line in Path(path).read_text(encoding='utf-8').splitlines():
        iri = line.strip()
        if not iri:
            continue
        index = store.id_of(iri)
        if index is None:
            logger.warning(f'Semente fora do snapshot ignorada: {iri}')
            continue
        seeds.append(index)
    return tuple(sorted(set(seeds)))
