"""
Configuração do pipeline.

Os padrões vêm de ``settings.ONTOLOGIA_PIPELINE``; um arquivo INI (``--config``)
sobrescreve chaves seção por seção e, por fim, as opções da linha de comando
sobrescrevem ambos.
"""
import configparser
import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError

from .linker import ExclusionPolicy
from .triplestore import IngestFilter

SNAPSHOT_NAME = 'snapshot.hier'

_LIST_SEPARATOR = re.compile(r'[\s,]+')


def default_sections():
    return copy.deepcopy(getattr(settings, 'ONTOLOGIA_PIPELINE', {}))


def expand_iri(value, prefixes):
    """``wd:Q5`` → IRI completa; ``<...>`` perde os sinais; o resto fica igual."""
    value = value.strip()
    if value.startswith('<') and value.endswith('>'):
        return value[1:-1]
    prefix, sep, local = value.partition(':')
    if sep and prefix in prefixes and not local.startswith('//'):
        return prefixes[prefix] + local
    return value


def _convert(section, key, raw, default):
    name = f'{section}.{key}'
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered in configparser.ConfigParser.BOOLEAN_STATES:
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]
        raise ValidationError({name: f'Valor booleano inválido: {raw!r}'})
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise ValidationError({name: f'Valor inteiro inválido: {raw!r}'})
    if isinstance(default, (list, tuple)):
        items = [item for item in _LIST_SEPARATOR.split(raw.strip()) if item]
        if key == 'cutoffs':
            try:
                return [int(item) for item in items]
            except ValueError:
                raise ValidationError({name: f'Lista de inteiros inválida: {raw!r}'})
        return items
    return raw.strip()


def read_ini(path, sections):
    """Aplica um arquivo INI sobre ``sections`` (alterado no lugar)."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding='utf-8') as fh:
            parser.read_file(fh)
    except configparser.Error as e:
        raise ValidationError({'config': f'Arquivo de configuração inválido: {e}'})
    for section in parser.sections():
        if section not in sections:
            raise ValidationError({section: 'Seção desconhecida.'})
        for key, raw in parser.items(section):
            if section == 'sparql':
                sections['sparql'].setdefault('prefixes', {})[key] = raw.strip()
                continue
            if key not in sections[section]:
                raise ValidationError({f'{section}.{key}': 'Chave desconhecida.'})
            sections[section][key] = _convert(section, key, raw, sections[section][key])
    return sections


def _as_int(sections, section, key):
    value = sections[section][key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError({f'{section}.{key}': f'Esperado um inteiro: {value!r}'})
    return value


@dataclass
class PipelineConfig:
    dump: tuple = ()
    snapshot: str = ''
    terms: str = ''
    ground_truth: str = ''
    output_dir: str = 'saida'
    filter: IngestFilter = None
    strict_snapshot: bool = True
    exclusion: ExclusionPolicy = field(default_factory=ExclusionPolicy)
    cu_threshold: int = 2
    common_path_threshold: int = 2
    max_depth: int = 30
    max_nes: int = 0
    trim: bool = True
    cutoffs: tuple = (1, 2, 3, 4, 5, 6, 7)
    workers: int = 1
    emit_sparql: bool = True
    prefixes: dict = field(default_factory=dict)
    source: str = ''

    @classmethod
    def load(cls, path=None, overrides=None):
        """Padrões do settings + INI opcional + ``overrides`` {(seção, chave): valor}."""
        sections = default_sections()
        if path:
            read_ini(path, sections)
        for (section, key), value in (overrides or {}).items():
            if value is not None:
                sections[section][key] = value
        config = cls.from_sections(sections)
        config.source = str(path or '')
        return config

    @classmethod
    def from_sections(cls, sections):
        prefixes = dict(sections.get('sparql', {}).get('prefixes', {}))

        def iris(section, key):
            return frozenset(expand_iri(v, prefixes) for v in sections[section][key])

        ingest = sections['ingest']
        exclusion = ExclusionPolicy(
            adjacent_blacklist=iris('exclusion', 'adjacent_blacklist'),
            adjacency_predicates=iris('exclusion', 'adjacency_predicates'),
            property_blacklist=iris('exclusion', 'property_blacklist'),
        )
        ingest_filter = IngestFilter(
            subclass_predicates=iris('ingest', 'subclass_predicates'),
            instance_predicates=iris('ingest', 'instance_predicates'),
            representative_label_predicates=iris('ingest', 'representative_label_predicates'),
            alias_label_predicates=iris('ingest', 'alias_label_predicates'),
            languages=frozenset(ingest['languages']),
            # a lista negra de propriedades só é avaliável se o predicado for retido
            extra_predicates=iris('ingest', 'extra_predicates') | exclusion.property_blacklist,
            case_fold=bool(ingest['case_fold']),
        )
        dump = sections['paths']['dump']
        if isinstance(dump, str):
            dump = [item for item in _LIST_SEPARATOR.split(dump.strip()) if item]
        return cls(
            dump=tuple(str(p) for p in dump),
            snapshot=str(sections['paths']['snapshot'] or ''),
            terms=str(sections['paths']['terms'] or ''),
            ground_truth=str(sections['paths']['ground_truth'] or ''),
            output_dir=str(sections['paths']['output_dir'] or '.'),
            filter=ingest_filter,
            strict_snapshot=bool(ingest['strict_snapshot']),
            exclusion=exclusion,
            cu_threshold=_as_int(sections, 'analysis', 'cu_threshold'),
            common_path_threshold=_as_int(sections, 'analysis', 'common_path_threshold'),
            max_depth=_as_int(sections, 'analysis', 'max_depth'),
            max_nes=_as_int(sections, 'analysis', 'max_nes'),
            trim=bool(sections['run']['trim']),
            cutoffs=tuple(int(c) for c in sections['run']['cutoffs']),
            workers=_as_int(sections, 'run', 'workers'),
            emit_sparql=bool(sections['run']['emit_sparql']),
            prefixes=prefixes,
        )

    def clean(self):
        """Valida limiares e predicados; ValidationError nomeia o campo."""
        for name in ('cu_threshold', 'common_path_threshold', 'max_depth', 'workers'):
            if getattr(self, name) < 1:
                raise ValidationError({name: 'Deve ser maior ou igual a 1.'})
        if self.max_nes < 0:
            raise ValidationError({'max_nes': 'Deve ser maior ou igual a 0 (0 = sem limite).'})
        if not self.cutoffs or min(self.cutoffs) < 1:
            raise ValidationError({'cutoffs': 'Informe cortes de NES maiores ou iguais a 1.'})
        self.filter.clean()
        self.exclusion.clean()
        outside = self.exclusion.adjacency_predicates - self.filter.hierarchy_predicates
        if outside:
            raise ValidationError({
                'adjacency_predicates': f'Predicados fora da hierarquia: {sorted(outside)}'
            })

    # -- caminhos ------------------------------------------------------------------

    @property
    def out(self):
        return Path(self.output_dir)

    @property
    def snapshot_path(self):
        return Path(self.snapshot) if self.snapshot else self.out / SNAPSHOT_NAME

    # -- fábricas --------------------------------------------------------------------

    def ingest_filter(self):
        return self.filter

    def exclusion_policy(self):
        return self.exclusion

    # -- impressão digital -----------------------------------------------------------

    def semantic_dict(self):
        """Configurações que afetam resultados (sem caminhos nem paralelismo)."""
        return {
            'filter': self.filter.as_dict(),
            'strict_snapshot': self.strict_snapshot,
            'exclusion': {
                'adjacent_blacklist': sorted(self.exclusion.adjacent_blacklist),
                'adjacency_predicates': sorted(self.exclusion.adjacency_predicates),
                'property_blacklist': sorted(self.exclusion.property_blacklist),
            },
            'analysis': {
                'cu_threshold': self.cu_threshold,
                'common_path_threshold': self.common_path_threshold,
                'max_depth': self.max_depth,
                'max_nes': self.max_nes,
            },
            'run': {
                'trim': self.trim,
                'cutoffs': sorted(set(self.cutoffs)),
                'emit_sparql': self.emit_sparql,
            },
            'prefixes': dict(sorted(self.prefixes.items())),
        }

    def fingerprint(self):
        canonical = json.dumps(self.semantic_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
