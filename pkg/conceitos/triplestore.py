"""
Armazenamento da hierarquia de classes lida de um dump N-Triples.

O dump é lido linha a linha (texto, sem SPARQL); apenas os predicados
configurados no ``IngestFilter`` são mantidos. Os identificadores são
internados em inteiros densos e as adjacências ficam em vetores CSR do numpy,
de modo que a memória cresce com as triplas mantidas e não com o arquivo.
"""
import gzip
import hashlib
import io
import json
import logging
import struct
import unicodedata
import zlib
from array import array
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import BinaryIO, Iterable, NamedTuple

import numpy as np
from django.core.exceptions import ValidationError
from rdflib import term as rdflib_term
from rdflib.exceptions import ParserError
from rdflib.plugins.parsers.ntriples import W3CNTriplesParser, r_nodeid
from tqdm import tqdm

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b'ONTOHIER'
SNAPSHOT_VERSION = 1

REPRESENTATIVE = 'representative'
ALIAS = 'alias'
LABEL_KINDS = (REPRESENTATIVE, ALIAS)
_KIND_CODES = {REPRESENTATIVE: 0, ALIAS: 1}

UP = 'up'
DOWN = 'down'

KEPT = 'kept'
DROPPED = 'dropped'
MALFORMED = 'malformed'

PROGRESS_STEP = 1_000_000


class IngestError(Exception):
    """Falha de leitura do dump; ``offset`` é a posição em bytes da falha."""

    def __init__(self, message, offset):
        super().__init__(f'{message} (offset {offset})')
        self.message = message
        self.offset = offset

    def __reduce__(self):
        # volta intacta dos processos de ingestão
        return type(self), (self.message, self.offset)


class SnapshotError(Exception):
    pass


class SnapshotFormatError(SnapshotError):
    pass


class SnapshotVersionError(SnapshotError):

    def __init__(self, found, expected):
        super().__init__(
            f'Versão de snapshot incompatível: arquivo={found}, suportada={expected}'
        )
        self.found = found
        self.expected = expected


class SnapshotFingerprintError(SnapshotError):

    def __init__(self, found, expected):
        super().__init__(
            f'Snapshot gerado com outro filtro: arquivo={found}, configurado={expected}'
        )
        self.found = found
        self.expected = expected


class SnapshotCorruptError(SnapshotError):
    pass


def normalize_label(text, case_fold=False):
    """NFC + remoção de espaços nas pontas (inclui o espaço ideográfico)."""
    text = unicodedata.normalize('NFC', text).strip()
    if case_fold:
        text = text.casefold()
    return text


class EntityRef(NamedTuple):
    iri: str
    id: int


class Literal(NamedTuple):
    lexical: str
    language: str | None = None
    datatype: str | None = None


class TripleRecord(NamedTuple):
    """Tripla analisada; ``object`` é IRI (str), nó em branco (``_:...``) ou ``Literal``."""
    subject: str
    predicate: str
    object: 'str | Literal'


@dataclass(frozen=True)
class IngestFilter:
    subclass_predicates: frozenset
    instance_predicates: frozenset
    representative_label_predicates: frozenset = frozenset()
    alias_label_predicates: frozenset = frozenset()
    languages: frozenset = frozenset()
    extra_predicates: frozenset = frozenset()
    case_fold: bool = False

    def __post_init__(self):
        for name in ('subclass_predicates', 'instance_predicates',
                     'representative_label_predicates', 'alias_label_predicates',
                     'extra_predicates'):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(
            self, 'languages', frozenset(tag.lower() for tag in self.languages)
        )

    @property
    def hierarchy_predicates(self):
        return self.subclass_predicates | self.instance_predicates

    @property
    def label_predicates(self):
        kinds = {p: ALIAS for p in self.alias_label_predicates}
        kinds.update({p: REPRESENTATIVE for p in self.representative_label_predicates})
        return kinds

    def clean(self):
        """Valida o filtro; levanta ValidationError nomeando o campo."""
        if not self.hierarchy_predicates:
            raise ValidationError(
                {'hierarchy_predicates': 'Informe ao menos um predicado de hierarquia.'}
            )
        overlap = self.hierarchy_predicates & set(self.label_predicates)
        if overlap:
            raise ValidationError({
                'label_predicates': f'Predicados usados como hierarquia e rótulo: {sorted(overlap)}'
            })
        overlap = self.extra_predicates & (self.hierarchy_predicates | set(self.label_predicates))
        if overlap:
            raise ValidationError({
                'extra_predicates': f'Predicados extras já usados em outro papel: {sorted(overlap)}'
            })
        if self.label_predicates and not self.languages:
            raise ValidationError({'languages': 'Informe ao menos um idioma para os rótulos.'})

    def as_dict(self):
        return {
            'subclass_predicates': sorted(self.subclass_predicates),
            'instance_predicates': sorted(self.instance_predicates),
            'representative_label_predicates': sorted(self.representative_label_predicates),
            'alias_label_predicates': sorted(self.alias_label_predicates),
            'languages': sorted(self.languages),
            'extra_predicates': sorted(self.extra_predicates),
            'case_fold': self.case_fold,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**{
            key: (value if key == 'case_fold' else frozenset(value))
            for key, value in data.items()
        })

    def fingerprint(self):
        canonical = json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


# -- leitura de linhas N-Triples ------------------------------------------------

class _LastTriple:
    """Destino do analisador do rdflib: guarda só a última tripla lida."""

    def __init__(self):
        self.found = None

    def triple(self, subject, predicate, obj):
        self.found = (subject, predicate, obj)


def _term(node):
    if isinstance(node, rdflib_term.BNode):
        return f'_:{node}'
    if isinstance(node, rdflib_term.Literal):
        return Literal(
            str(node),
            node.language.lower() if node.language else None,
            str(node.datatype) if node.datatype else None,
        )
    return str(node)


class NTriplesLineParser(W3CNTriplesParser):
    """Analisador N-Triples do rdflib aplicado a uma linha por vez."""

    def __init__(self):
        super().__init__(sink=_LastTriple())
        self.skolemize = False

    def nodeid(self, bnode_context=None):
        # mantém o rótulo do dump em vez de gerar um nó novo
        if not self.peek('_'):
            return False
        return rdflib_term.BNode(self.eat(r_nodeid).group(1))

    def parse(self, line):
        """Analisa uma linha (bytes ou str). Retorna None se malformada."""
        if isinstance(line, bytes):
            try:
                line = line.decode('utf-8')
            except UnicodeDecodeError:
                return None
        self.line = line.strip()
        self.sink.found = None
        try:
            self.parseline()
        except (ParserError, ValueError):
            return None
        if self.sink.found is None:
            return None
        subject, predicate, obj = self.sink.found
        return TripleRecord(_term(subject), str(predicate), _term(obj))


def parse_triple(line):
    """Analisa uma linha N-Triples isolada. Retorna None se malformada."""
    return NTriplesLineParser().parse(line)


@dataclass
class IngestReport:
    """Contabilidade por linha: mantidas + descartadas + malformadas = total."""
    total_lines: int = 0
    kept: int = 0
    dropped: int = 0
    malformed: int = 0
    per_predicate: dict = field(default_factory=lambda: defaultdict(Counter))
    reasons: Counter = field(default_factory=Counter)

    def count(self, outcome, predicate=None, reason=None):
        self.total_lines += 1
        if outcome == KEPT:
            self.kept += 1
        elif outcome == DROPPED:
            self.dropped += 1
        else:
            self.malformed += 1
        if predicate is not None:
            self.per_predicate[predicate][outcome] += 1
        if reason:
            self.reasons[reason] += 1

    def merge(self, other):
        self.total_lines += other.total_lines
        self.kept += other.kept
        self.dropped += other.dropped
        self.malformed += other.malformed
        for predicate, counts in other.per_predicate.items():
            self.per_predicate[predicate].update(counts)
        self.reasons.update(other.reasons)

    @property
    def status(self):
        return 'warning' if self.kept == 0 else 'ok'

    def rows(self):
        """Linhas do relatório TSV: predicado, mantidas, descartadas, malformadas."""
        for predicate in sorted(self.per_predicate):
            counts = self.per_predicate[predicate]
            yield (predicate, counts[KEPT], counts[DROPPED], counts[MALFORMED])
        for reason in sorted(self.reasons):
            yield (f'(motivo) {reason}', 0, self.reasons[reason], 0)
        yield ('(total)', self.kept, self.dropped, self.malformed)

    def as_dict(self):
        return {
            'total_lines': self.total_lines,
            'kept': self.kept,
            'dropped': self.dropped,
            'malformed': self.malformed,
            'per_predicate': {p: dict(sorted(c.items())) for p, c in sorted(self.per_predicate.items())},
            'reasons': dict(sorted(self.reasons.items())),
        }

    @classmethod
    def from_dict(cls, data):
        report = cls(
            total_lines=data['total_lines'], kept=data['kept'],
            dropped=data['dropped'], malformed=data['malformed'],
        )
        for predicate, counts in data['per_predicate'].items():
            report.per_predicate[predicate].update(counts)
        report.reasons.update(data['reasons'])
        return report


# -- construção -------------------------------------------------------------------

def _int64(buffer):
    if not len(buffer):
        return np.empty(0, dtype=np.int64)
    return np.frombuffer(buffer, dtype=np.int64).copy()


def _unique_pairs(src, dst, size):
    """Pares (src, dst) únicos, ordenados por src e depois dst."""
    if not len(src):
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    keys = np.unique(src.astype(np.int64) * size + dst.astype(np.int64))
    return keys // size, keys % size


class _Csr:
    """Linhas de adjacência comprimidas; ``indices`` ordenados dentro de cada linha."""

    def __init__(self, src, dst, size):
        self.indptr = np.zeros(size + 1, dtype=np.int64)
        if len(src):
            np.cumsum(np.bincount(src, minlength=size), out=self.indptr[1:])
        self.indices = dst.astype(np.int32)

    def row(self, index):
        return self.indices[self.indptr[index]:self.indptr[index + 1]]

    def __len__(self):
        return len(self.indices)


class HierStoreBuilder:
    """Acumula triplas mantidas; ``build()`` congela em um ``HierStore`` imutável."""

    def __init__(self, ingest_filter):
        self.filter = ingest_filter
        self.report = IngestReport()
        self._ids = {}
        self._iris = []
        self._edges = {p: (array('q'), array('q')) for p in ingest_filter.hierarchy_predicates}
        self._properties = {p: array('q') for p in ingest_filter.extra_predicates}
        self._texts = {}
        self._text_list = []
        self._label_entity = array('q')
        self._label_kind = array('b')
        self._label_text = array('q')
        self._label_kinds = ingest_filter.label_predicates

    def intern(self, iri):
        index = self._ids.get(iri)
        if index is None:
            index = self._ids[iri] = len(self._iris)
            self._iris.append(iri)
        return index

    def add_edge(self, subject, predicate, obj):
        src, dst = self._edges[predicate]
        src.append(self.intern(subject))
        dst.append(self.intern(obj))

    def add_property(self, subject, predicate):
        self._properties[predicate].append(self.intern(subject))

    def add_label(self, subject, kind, text):
        text = normalize_label(text, self.filter.case_fold)
        if not text:
            return False
        text_id = self._texts.get(text)
        if text_id is None:
            text_id = self._texts[text] = len(self._text_list)
            self._text_list.append(text)
        self._label_entity.append(self.intern(subject))
        self._label_kind.append(_KIND_CODES[kind])
        self._label_text.append(text_id)
        return True

    def add_triple(self, triple):
        """Aplica o filtro a uma tripla. Retorna (resultado, motivo)."""
        subject, predicate, obj = triple
        if subject.startswith('_:'):
            return DROPPED, 'blank_subject'
        if predicate in self._edges:
            if not isinstance(obj, str) or obj.startswith('_:'):
                return DROPPED, 'non_iri_object'
            self.add_edge(subject, predicate, obj)
            return KEPT, None
        kind = self._label_kinds.get(predicate)
        if kind is not None:
            if not isinstance(obj, Literal):
                return DROPPED, 'non_literal_label'
            if obj.datatype is not None:
                return DROPPED, 'typed_literal'
            if obj.language is None:
                return DROPPED, 'untagged_literal'
            if obj.language not in self.filter.languages:
                return DROPPED, 'language'
            if not self.add_label(subject, kind, obj.lexical):
                return DROPPED, 'empty_label'
            return KEPT, None
        if predicate in self._properties:
            self.add_property(subject, predicate)
            return KEPT, None
        return DROPPED, 'predicate'

    def consume(self, lines, offset=0, progress=None):
        """Lê linhas (bytes) de um iterável; erros de leitura viram IngestError."""
        iterator = iter(lines)
        parser = NTriplesLineParser()
        while True:
            try:
                line = next(iterator)
            except StopIteration:
                break
            except (OSError, EOFError, zlib.error) as e:
                raise IngestError(f'Erro ao ler o dump: {e}', offset) from e
            offset += len(line)
            self.consume_line(line, parser)
            if progress is not None and self.report.total_lines % 100_000 == 0:
                progress.update(100_000)
            if self.report.total_lines % PROGRESS_STEP == 0:
                logger.info(
                    f'{self.report.total_lines:,} linhas lidas '
                    f'(mantidas={self.report.kept:,}, descartadas={self.report.dropped:,}, '
                    f'malformadas={self.report.malformed:,})'
                )
        return offset

    def consume_line(self, line, parser=None):
        stripped = line.strip()
        if not stripped or stripped.startswith(b'#'):
            self.report.count(DROPPED, reason='blank_or_comment')
            return
        if parser is None:
            parser = NTriplesLineParser()
        triple = parser.parse(stripped)
        if triple is None:
            self.report.count(MALFORMED)
            return
        outcome, reason = self.add_triple(triple)
        self.report.count(outcome, triple.predicate, reason)

    def merge(self, other):
        """Incorpora uma partição construída em paralelo."""
        remap = np.array([self.intern(iri) for iri in other._iris], dtype=np.int64)
        for predicate, (src, dst) in other._edges.items():
            mine_src, mine_dst = self._edges[predicate]
            mine_src.extend(remap[_int64(src)].tolist())
            mine_dst.extend(remap[_int64(dst)].tolist())
        for predicate, subjects in other._properties.items():
            self._properties[predicate].extend(remap[_int64(subjects)].tolist())
        text_remap = []
        for text in other._text_list:
            text_id = self._texts.get(text)
            if text_id is None:
                text_id = self._texts[text] = len(self._text_list)
                self._text_list.append(text)
            text_remap.append(text_id)
        text_remap = np.array(text_remap, dtype=np.int64)
        self._label_entity.extend(remap[_int64(other._label_entity)].tolist())
        self._label_kind.extend(other._label_kind)
        self._label_text.extend(text_remap[_int64(other._label_text)].tolist())
        self.report.merge(other.report)

    def build(self):
        """Renumera por ordem de IRI, remove duplicatas e monta o HierStore."""
        size = len(self._iris)
        order = sorted(range(size), key=self._iris.__getitem__)
        iris = [self._iris[i] for i in order]
        remap = np.empty(size, dtype=np.int64)
        remap[np.asarray(order, dtype=np.int64)] = np.arange(size, dtype=np.int64)

        edges = {}
        for predicate, (src, dst) in self._edges.items():
            edges[predicate] = _unique_pairs(remap[_int64(src)], remap[_int64(dst)], size)
        properties = {
            predicate: np.unique(remap[_int64(subjects)])
            for predicate, subjects in self._properties.items()
        }

        text_order = sorted(range(len(self._text_list)), key=self._text_list.__getitem__)
        texts = [self._text_list[i] for i in text_order]
        text_remap = np.empty(len(texts), dtype=np.int64)
        text_remap[np.asarray(text_order, dtype=np.int64)] = np.arange(len(texts), dtype=np.int64)
        entity = remap[_int64(self._label_entity)]
        kind = np.frombuffer(self._label_kind, dtype=np.int8).astype(np.int64) if len(self._label_kind) else np.empty(0, dtype=np.int64)
        text = text_remap[_int64(self._label_text)]
        if len(entity):
            keys = np.unique((text * 2 + kind) * max(size, 1) + entity)
            entity = keys % max(size, 1)
            kind = (keys // max(size, 1)) % 2
            text = keys // max(size, 1) // 2
        labels = (entity.astype(np.int32), kind.astype(np.int8), text.astype(np.int32))
        return HierStore(self.filter, iris, edges, properties, texts, labels, self.report)


class HierStore:
    """Instantâneo consultável do LOD. Imutável após a construção."""

    def __init__(self, ingest_filter, iris, edges, properties, texts, labels, report=None):
        self.filter = ingest_filter
        self.report = report or IngestReport()
        self._iris = iris
        self._ids = {iri: index for index, iri in enumerate(iris)}
        size = len(iris)
        self._edges = edges
        self._up = {p: _Csr(src, dst, size) for p, (src, dst) in edges.items()}
        self._down = {
            p: _Csr(*_unique_pairs(dst, src, size), size) for p, (src, dst) in edges.items()
        }
        self._properties = properties
        self._texts = texts
        self._text_ids = {text: index for index, text in enumerate(texts)}
        # linhas de rótulo ordenadas por (texto, tipo, entidade)
        self._label_entity, self._label_kind, self._label_text = labels
        by_entity = np.lexsort((self._label_text, self._label_kind, self._label_entity))
        self._by_entity = by_entity
        self._entity_sorted = self._label_entity[by_entity]

    def __len__(self):
        return len(self._iris)

    def __contains__(self, iri):
        return iri in self._ids

    @property
    def fingerprint(self):
        return self.filter.fingerprint()

    @property
    def counts(self):
        """Contadores por predicado; iguais aos totais das listas de adjacência."""
        counts = {p: len(csr) for p, csr in self._up.items()}
        counts.update({p: len(subjects) for p, subjects in self._properties.items()})
        for kind, code in _KIND_CODES.items():
            counts[f'label:{kind}'] = int(np.count_nonzero(self._label_kind == code))
        return dict(sorted(counts.items()))

    @property
    def hierarchy_triples(self):
        return sum(len(csr) for csr in self._up.values())

    @property
    def label_entries(self):
        return len(self._label_entity)

    def ref(self, iri):
        index = self._ids.get(iri)
        return None if index is None else EntityRef(iri, index)

    def id_of(self, iri):
        return self._ids.get(iri)

    def iri(self, index):
        return self._iris[index]

    def _resolve(self, entity):
        if isinstance(entity, EntityRef):
            entity = entity.id
        elif isinstance(entity, str):
            return self._ids.get(entity)
        if entity is None or not 0 <= entity < len(self._iris):
            return None
        return int(entity)

    def row(self, entity, direction, predicate):
        """Linha crua (numpy) de um único predicado; vazia se desconhecido."""
        index = self._resolve(entity)
        table = self._up if direction == UP else self._down
        if index is None or predicate not in table:
            return np.empty(0, dtype=np.int32)
        return table[predicate].row(index)

    def neighbors(self, entity, direction, predicates=None):
        """Vizinhos em ordem crescente de id; entidade desconhecida → lista vazia."""
        if direction not in (UP, DOWN):
            raise ValueError(f'Direção inválida: {direction}')
        index = self._resolve(entity)
        if index is None:
            return []
        table = self._up if direction == UP else self._down
        if predicates is None:
            predicates = self.filter.hierarchy_predicates
        rows = [table[p].row(index) for p in sorted(predicates) if p in table]
        rows = [row for row in rows if len(row)]
        if not rows:
            return []
        if len(rows) == 1:
            return rows[0].tolist()
        return np.unique(np.concatenate(rows)).tolist()

    def has_property(self, entity, predicate):
        index = self._resolve(entity)
        subjects = self._properties.get(predicate)
        if index is None or subjects is None or not len(subjects):
            return False
        position = np.searchsorted(subjects, index)
        return bool(position < len(subjects) and subjects[position] == index)

    def lookup_label(self, term, kinds=LABEL_KINDS):
        """Entidades cujo rótulo (normalizado) é exatamente ``term``."""
        text_id = self._text_ids.get(normalize_label(term, self.filter.case_fold))
        if text_id is None:
            return []
        lo = np.searchsorted(self._label_text, text_id, side='left')
        hi = np.searchsorted(self._label_text, text_id, side='right')
        codes = [_KIND_CODES[kind] for kind in kinds]
        mask = np.isin(self._label_kind[lo:hi], codes)
        return np.unique(self._label_entity[lo:hi][mask]).tolist()

    def labels(self, entity, kinds=LABEL_KINDS):
        """Rótulos normalizados de uma entidade, representativos primeiro."""
        index = self._resolve(entity)
        if index is None:
            return []
        lo = np.searchsorted(self._entity_sorted, index, side='left')
        hi = np.searchsorted(self._entity_sorted, index, side='right')
        codes = {_KIND_CODES[kind] for kind in kinds}
        rows = self._by_entity[lo:hi]
        return [
            self._texts[self._label_text[row]]
            for row in rows if int(self._label_kind[row]) in codes
        ]

    def label(self, entity):
        """Rótulo para exibição: o primeiro representativo, ou o IRI."""
        names = self.labels(entity, (REPRESENTATIVE,)) or self.labels(entity)
        if names:
            return names[0]
        index = self._resolve(entity)
        return self._iris[index] if index is not None else str(entity)

    def edges(self, predicate):
        """Pares (filho, pai) de um predicado de hierarquia."""
        empty = np.empty(0, dtype=np.int64)
        src, dst = self._edges.get(predicate, (empty, empty))
        return list(zip(src.tolist(), dst.tolist()))

    def snapshot_arrays(self):
        arrays = {}
        arrays['iris/blob'], arrays['iris/offsets'] = _pack_strings(self._iris)
        for index, predicate in enumerate(sorted(self._edges)):
            src, dst = self._edges[predicate]
            arrays[f'edges/{index}/src'] = src.astype(np.int64)
            arrays[f'edges/{index}/dst'] = dst.astype(np.int64)
        for index, predicate in enumerate(sorted(self._properties)):
            arrays[f'properties/{index}'] = self._properties[predicate].astype(np.int64)
        arrays['labels/blob'], arrays['labels/offsets'] = _pack_strings(self._texts)
        arrays['labels/entity'] = self._label_entity
        arrays['labels/kind'] = self._label_kind
        arrays['labels/text'] = self._label_text
        return arrays


# -- ingestão ----------------------------------------------------------------------

def _tqdm_disable(progress):
    """``None`` deixa o tqdm decidir (desligado fora de um terminal)."""
    return None if progress is None else not progress


def open_dump(path):
    """Abre o dump em modo binário; ``.gz`` é descomprimido em fluxo."""
    path = Path(path)
    if path.suffix == '.gz':
        return gzip.open(path, 'rb')
    return open(path, 'rb')


def ingest(stream, ingest_filter, progress=False):
    """Constrói um HierStore a partir de um fluxo de linhas N-Triples."""
    ingest_filter.clean()
    builder = HierStoreBuilder(ingest_filter)
    with tqdm(unit=' linhas', unit_scale=True, disable=_tqdm_disable(progress), leave=False) as bar:
        builder.consume(stream, progress=bar)
    return _finish(builder)


def _finish(builder):
    store = builder.build()
    report = store.report
    if report.kept == 0:
        logger.warning(f'Nenhuma tripla mantida em {report.total_lines:,} linhas; store vazio.')
    else:
        logger.info(
            f'Ingestão concluída: {report.kept:,} mantidas, {report.dropped:,} descartadas, '
            f'{report.malformed:,} malformadas; {len(store):,} entidades.'
        )
    return store


def plan_partitions(paths, workers):
    """Divide os dumps em faixas de bytes alinhadas a quebras de linha.

    Arquivos ``.gz`` não permitem acesso aleatório e viram uma partição cada.
    """
    partitions = []
    for path in map(Path, paths):
        if path.suffix == '.gz' or workers <= 1:
            partitions.append((path, 0, None))
            continue
        size = path.stat().st_size
        step = max(1, -(-size // workers))
        for start in range(0, max(size, 1), step):
            partitions.append((path, start, min(start + step, size)))
    return partitions


def _read_partition(path, start, end):
    """Gera as linhas cujo primeiro byte está em [start, end)."""
    with open_dump(path) as fh:
        if start:
            fh.seek(start - 1)
            fh.readline()
        while True:
            if end is not None and fh.tell() >= end:
                break
            line = fh.readline()
            if not line:
                break
            yield line


def _ingest_partition(partition, ingest_filter, progress):
    path, start, end = partition
    builder = HierStoreBuilder(ingest_filter)
    logger.debug(f'Lendo partição {path} [{start}, {end})')
    with tqdm(unit=' linhas', unit_scale=True, disable=_tqdm_disable(progress), leave=False,
              desc=path.name) as bar:
        builder.consume(_read_partition(path, start, end), offset=start, progress=bar)
    return builder


def ingest_paths(paths, ingest_filter, workers=1, progress=True):
    """Ingestão de um ou mais arquivos, com partições lidas em processos separados.

    A fusão é determinística: o store é renumerado pela ordem das IRIs.
    """
    ingest_filter.clean()
    partitions = plan_partitions(paths, workers)
    read = partial(_ingest_partition, ingest_filter=ingest_filter, progress=progress)
    if len(partitions) <= 1 or workers <= 1:
        builders = [read(partition) for partition in partitions]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(partitions))) as executor:
            builders = list(executor.map(read, partitions))
    builder = builders[0] if builders else HierStoreBuilder(ingest_filter)
    for other in builders[1:]:
        builder.merge(other)
    return _finish(builder)


# -- snapshot ----------------------------------------------------------------------

def _pack_strings(strings):
    encoded = [s.encode('utf-8') for s in strings]
    offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
    if encoded:
        np.cumsum([len(e) for e in encoded], out=offsets[1:])
    blob = np.frombuffer(b''.join(encoded), dtype=np.uint8) if encoded else np.empty(0, dtype=np.uint8)
    return blob, offsets


def _unpack_strings(blob, offsets):
    raw = blob.tobytes()
    return [raw[offsets[i]:offsets[i + 1]].decode('utf-8') for i in range(len(offsets) - 1)]


def save_snapshot(store, path):
    """Grava o store em um único arquivo binário versionado com checksum."""
    payload = io.BytesIO()
    for name, values in store.snapshot_arrays().items():
        buffer = io.BytesIO()
        np.save(buffer, np.ascontiguousarray(values), allow_pickle=False)
        data = buffer.getvalue()
        encoded = name.encode('utf-8')
        payload.write(struct.pack('<I', len(encoded)))
        payload.write(encoded)
        payload.write(struct.pack('<Q', len(data)))
        payload.write(data)
    body = payload.getvalue()
    header = {
        'format_version': SNAPSHOT_VERSION,
        'filter': store.filter.as_dict(),
        'filter_fingerprint': store.fingerprint,
        'hierarchy_predicates': sorted(store._edges),
        'extra_predicates': sorted(store._properties),
        'counts': store.counts,
        'entities': len(store),
        'report': store.report.as_dict(),
        'payload_sha256': hashlib.sha256(body).hexdigest(),
    }
    header_bytes = json.dumps(header, sort_keys=True, ensure_ascii=False).encode('utf-8')
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack('<II', SNAPSHOT_VERSION, len(header_bytes)))
        fh.write(header_bytes)
        fh.write(body)
    logger.info(f'Snapshot gravado em {path} ({len(store):,} entidades)')
    return path


def read_snapshot_header(fh):
    magic = fh.read(len(SNAPSHOT_MAGIC))
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f'Arquivo não é um snapshot (magic={magic!r})')
    try:
        version, header_length = struct.unpack('<II', fh.read(8))
    except struct.error as e:
        raise SnapshotFormatError('Cabeçalho do snapshot truncado') from e
    if version != SNAPSHOT_VERSION:
        raise SnapshotVersionError(version, SNAPSHOT_VERSION)
    try:
        return json.loads(fh.read(header_length).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SnapshotFormatError('Cabeçalho do snapshot ilegível') from e


def load_snapshot(path, expected_fingerprint=None, strict=True):
    """Lê um snapshot gravado por ``save_snapshot``.

    Com ``strict`` e ``expected_fingerprint`` informado, um filtro diferente do
    configurado é recusado; sem ``strict`` apenas gera um aviso.
    """
    with open(path, 'rb') as fh:
        header = read_snapshot_header(fh)
        body = fh.read()
    if hashlib.sha256(body).hexdigest() != header.get('payload_sha256'):
        raise SnapshotCorruptError(f'Checksum do snapshot não confere: {path}')
    found = header['filter_fingerprint']
    if expected_fingerprint and found != expected_fingerprint:
        if strict:
            raise SnapshotFingerprintError(found, expected_fingerprint)
        logger.warning(
            f'Snapshot {path} usa outro filtro ({found} != {expected_fingerprint}); '
            'prosseguindo em modo não estrito.'
        )

    arrays = {}
    view = memoryview(body)
    position = 0
    while position < len(body):
        (name_length,) = struct.unpack_from('<I', body, position)
        position += 4
        name = bytes(view[position:position + name_length]).decode('utf-8')
        position += name_length
        (data_length,) = struct.unpack_from('<Q', body, position)
        position += 8
        arrays[name] = np.load(io.BytesIO(view[position:position + data_length]), allow_pickle=False)
        position += data_length

    ingest_filter = IngestFilter.from_dict(header['filter'])
    iris = _unpack_strings(arrays['iris/blob'], arrays['iris/offsets'])
    edges = {
        predicate: (arrays[f'edges/{i}/src'], arrays[f'edges/{i}/dst'])
        for i, predicate in enumerate(header['hierarchy_predicates'])
    }
    properties = {
        predicate: arrays[f'properties/{i}']
        for i, predicate in enumerate(header['extra_predicates'])
    }
    texts = _unpack_strings(arrays['labels/blob'], arrays['labels/offsets'])
    labels = (arrays['labels/entity'], arrays['labels/kind'], arrays['labels/text'])
    report = IngestReport.from_dict(header['report'])
    logger.info(f'Snapshot carregado de {path} ({len(iris):,} entidades)')
    return HierStore(ingest_filter, iris, edges, properties, texts, labels, report)


def iter_lines(text):
    """Converte texto N-Triples em linhas de bytes (útil para fixtures)."""
    return [line.encode('utf-8') for line in text.splitlines(keepends=True)]


def write_ingest_report(report, path):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('predicate\tkept\tdropped\tmalformed\n')
        for predicate, kept, dropped, malformed in report.rows():
            fh.write(f'{predicate}\t{kept}\t{dropped}\t{malformed}\n')
