"""
Orquestração das etapas do pipeline.

Cada etapa valida suas entradas, grava os artefatos no diretório de saída e
registra no ``manifest.json`` os checksums SHA-256 de entradas e saídas e os
avisos emitidos. Durações ficam no banco (``Execucao``/``RegistroEtapa``) e no
log; o manifesto não as contém, para que reexecuções idênticas produzam
manifestos idênticos.
"""
import hashlib
import json
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from django.core.exceptions import ValidationError
from django.db import DatabaseError

from . import ecu as ecu_analysis
from . import exporters
from .evaluation import build_ground_truth, evaluate, report
from .harvest import (
    CANDIDATES_SCHEMA, emit_sparql, expand_down, harvests_from_candidates, merge_harvests,
    read_candidates, write_candidates, write_harvest_report,
)
from .linker import apply_exclusions, link_terms, load_terms_file, read_seeds, write_search_entities, write_seeds
from .triplestore import SNAPSHOT_VERSION, ingest_paths, load_snapshot, save_snapshot, write_ingest_report
from .trimming import trim_all, write_trim_report
from .upper_graph import dump_upper_graph, find_common_paths, find_cu, integrate, load_upper_graph, trace_all

logger = logging.getLogger(__name__)

STAGES = ('ingest', 'link', 'upper', 'ecu', 'harvest', 'trim', 'eval')
MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1

INGEST_REPORT = 'ingest_report.tsv'
SEARCH_ENTITIES = 'search_entities.tsv'
SEEDS = 'seeds.txt'
UPPER_GRAPH = 'upper_graph'
ECU = 'ecu'
RESIDUAL_GRAPH = 'residual_graph.dot'
CANDIDATES = 'candidates.jsonl'
HARVEST_REPORT = 'harvest_report.tsv'
SPARQL_DIR = 'sparql'
TRIMMED = 'trimmed.jsonl'
TRIM_REPORT = 'trim_report.tsv'
NES_STATISTICS = 'nes_statistics.tsv'
EVAL_ALL = 'eval_all'
EVAL_TRIMMED = 'eval_trimmed'

_UNSAFE_NAME = re.compile(r'[^A-Za-z0-9_\-]')


class MissingInputError(Exception):
    def __init__(self, path, hint=''):
        self.path = str(path)
        message = f'Entrada ausente: {self.path}'
        if hint:
            message += f' ({hint})'
        super().__init__(message)


class StageError(Exception):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f'Falha na etapa {stage}: {cause}')


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for block in iter(lambda: fh.read(1 << 20), b''):
            digest.update(block)
    return digest.hexdigest()


def local_name(iri):
    """Nome de arquivo a partir do fim da IRI (``.../Q81163`` → ``Q81163``)."""
    tail = re.split(r'[/#]', iri.rstrip('/#'))[-1]
    return _UNSAFE_NAME.sub('_', tail) or 'entidade'


class _WarningCollector(logging.Handler):
    """Acumula as mensagens WARNING+ emitidas durante uma etapa."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages = []

    def emit(self, record):
        self.messages.append(record.getMessage())


class PipelineManager:
    """Executa as etapas sobre uma ``PipelineConfig`` já validada."""

    def __init__(self, config, workers=None, progress=None, registrar=True):
        self.config = config
        self.workers = max(1, workers or config.workers)
        self.progress = progress
        self.registrar = registrar
        self.out = config.out
        self._store = None
        self._execucao = None
        self.manifest = None

    # -- infraestrutura ----------------------------------------------------------

    def prepare(self):
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ValidationError({'output_dir': f'Não foi possível criar {self.out}: {e}'})
        if not os.access(self.out, os.W_OK):
            raise ValidationError({'output_dir': f'Diretório sem permissão de escrita: {self.out}'})
        if self.manifest is None:
            self.manifest = self._load_manifest()

    def _new_manifest(self):
        return {
            'manifest_version': MANIFEST_VERSION,
            'config_fingerprint': self.config.fingerprint(),
            'artifact_versions': {
                'snapshot': SNAPSHOT_VERSION,
                'candidates': CANDIDATES_SCHEMA,
            },
            'stages': {},
        }

    def _load_manifest(self):
        path = self.out / MANIFEST_NAME
        if path.exists():
            try:
                with open(path, encoding='utf-8') as fh:
                    manifest = json.load(fh)
            except (OSError, json.JSONDecodeError):
                logger.warning(f'Manifesto ilegível descartado: {path}')
            else:
                if manifest.get('config_fingerprint') == self.config.fingerprint():
                    return manifest
        return self._new_manifest()

    def _write_manifest(self):
        path = self.out / MANIFEST_NAME
        with open(path, 'w', encoding='utf-8', newline='') as fh:
            json.dump(self.manifest, fh, ensure_ascii=False, indent=1, sort_keys=True)
            fh.write('\n')

    def _display(self, path):
        path = Path(path)
        try:
            return path.resolve().relative_to(self.out.resolve()).as_posix()
        except ValueError:
            return str(path)

    def _checksums(self, paths):
        sums = {}
        for path in paths:
            path = Path(path)
            files = sorted(p for p in path.rglob('*') if p.is_file()) if path.is_dir() else [path]
            for item in files:
                sums[self._display(item)] = sha256_file(item)
        return dict(sorted(sums.items()))

    def path(self, name):
        return self.out / name

    def require(self, path, hint=''):
        path = Path(path) if path else None
        if path is None or not path.exists():
            raise MissingInputError(path or hint, hint if path else '')
        return path

    @property
    def store(self):
        if self._store is None:
            snapshot = self.require(self.config.snapshot_path, 'execute a ingestão antes')
            self._store = load_snapshot(
                snapshot,
                expected_fingerprint=self.config.filter.fingerprint(),
                strict=self.config.strict_snapshot,
            )
        return self._store

    def executor(self):
        return ThreadPoolExecutor(max_workers=self.workers)

    # -- registros no banco --------------------------------------------------------

    def _db(self, action, *args):
        if not self.registrar:
            return None
        try:
            return action(*args)
        except DatabaseError as e:
            logger.warning(f'Histórico de execução não registrado ({e}); rode "migrate"')
            self.registrar = False
            return None

    def iniciar_execucao(self, comando):
        from .models import Execucao

        def criar():
            return Execucao.objects.create(
                comando=comando,
                fingerprint=self.config.fingerprint(),
                arquivo_config=self.config.source,
                diretorio_saida=str(self.out),
                workers=self.workers,
            )
        self._execucao = self._db(criar)
        return self._execucao

    def finalizar_execucao(self, sucesso):
        if self._execucao is not None:
            self._db(self._execucao.finalizar, sucesso)

    def _registrar_etapa(self, etapa, duracao, sucesso, avisos, saidas=None, erro=''):
        from .models import RegistroEtapa

        if self._execucao is None:
            return

        def criar():
            return RegistroEtapa.objects.create(
                execucao=self._execucao,
                etapa=etapa,
                sucesso=sucesso,
                duracao=duracao,
                avisos='\n'.join(avisos),
                erro=erro,
                saidas=saidas or {},
            )
        self._db(criar)

    # -- execução de etapas ----------------------------------------------------------

    def run_stage(self, name):
        """Executa uma etapa, atualiza o manifesto e devolve a entrada gravada."""
        if name not in STAGES:
            raise ValueError(f'Etapa desconhecida: {name}')
        self.prepare()
        collector = _WarningCollector()
        package_logger = logging.getLogger('conceitos')
        package_logger.addHandler(collector)
        started = time.monotonic()
        logger.info(f'Etapa {name} iniciada')
        try:
            inputs, outputs = getattr(self, f'_{name}')()
        except (MissingInputError, ValidationError):
            raise
        except Exception as e:
            self._registrar_etapa(
                name, time.monotonic() - started, False, collector.messages, erro=str(e)
            )
            raise StageError(name, e) from e
        finally:
            package_logger.removeHandler(collector)
        entry = {
            'inputs': self._checksums(inputs),
            'outputs': self._checksums(outputs),
            'warnings': collector.messages,
        }
        self.manifest['stages'][name] = entry
        self._write_manifest()
        elapsed = time.monotonic() - started
        self._registrar_etapa(name, elapsed, True, collector.messages, entry['outputs'])
        logger.info(f'Etapa {name} concluída em {elapsed:.1f}s')
        return entry

    def run(self, name):
        """Subcomando isolado: uma etapa com seu próprio registro de execução."""
        self.prepare()
        self.iniciar_execucao(name)
        try:
            entry = self.run_stage(name)
        except Exception:
            self.finalizar_execucao(False)
            raise
        self.finalizar_execucao(True)
        return entry

    def run_all(self):
        """Encadeia todas as etapas; a poda é pulada quando desligada na configuração."""
        self.prepare()
        self.manifest = self._new_manifest()
        self.iniciar_execucao('run_all')
        try:
            for name in STAGES:
                if name == 'trim' and not self.config.trim:
                    logger.info('Poda desligada na configuração; etapa trim ignorada')
                    continue
                self.run_stage(name)
        except Exception:
            self.finalizar_execucao(False)
            raise
        self.finalizar_execucao(True)
        return self.manifest

    # -- etapas ----------------------------------------------------------------------

    def _ingest(self):
        if not self.config.dump:
            raise MissingInputError('paths.dump', 'nenhum dump configurado')
        dumps = [self.require(path) for path in self.config.dump]
        store = ingest_paths(
            dumps, self.config.ingest_filter(), workers=self.workers, progress=self.progress
        )
        snapshot = self.config.snapshot_path
        snapshot.parent.mkdir(parents=True, exist_ok=True)
        save_snapshot(store, snapshot)
        write_ingest_report(store.report, self.path(INGEST_REPORT))
        self._store = store
        return dumps, [snapshot, self.path(INGEST_REPORT)]

    def _link(self):
        terms_path = self.require(self.config.terms or None, 'paths.terms')
        store = self.store
        terms = load_terms_file(terms_path, case_fold=store.filter.case_fold)
        candidates = link_terms(terms, store, workers=self.workers)
        entity_set = apply_exclusions(candidates, self.config.exclusion_policy(), store)
        if not entity_set.seeds:
            logger.warning('Nenhuma entidade de busca após as exclusões')
        write_search_entities(entity_set, store, self.path(SEARCH_ENTITIES))
        write_seeds(entity_set, store, self.path(SEEDS))
        return (
            [self.config.snapshot_path, terms_path],
            [self.path(SEARCH_ENTITIES), self.path(SEEDS)],
        )

    def _upper(self):
        seeds_path = self.require(self.path(SEEDS), 'execute a etapa link antes')
        store = self.store
        seeds = read_seeds(seeds_path, store)
        if len(seeds) < 2:
            logger.warning(f'Apenas {len(seeds)} entidade(s) de busca; nenhuma CU é possível')
        with self.executor() as executor:
            traces = trace_all(seeds, store, self.config.max_depth, executor)
        graph = integrate(traces)
        cu = find_cu(graph, self.config.cu_threshold)
        common = find_common_paths(graph, cu, self.config.common_path_threshold)
        logger.info(
            f'Grafo superior: {len(graph.nodes)} nós, {len(graph.edges)} arestas, '
            f'{len(cu)} CU, {len(common)} caminhos comuns'
        )
        outputs = [self.path(f'{UPPER_GRAPH}.json')]
        dump_upper_graph(outputs[0], graph, cu, common, store)
        digraph = exporters.upper_digraph(graph, cu, common, store)
        for fmt in ('tsv', 'dot', 'graphml'):
            target = self.path(f'{UPPER_GRAPH}.{fmt}')
            exporters.export_digraph(digraph, fmt, target)
            outputs.append(target)
        return [self.config.snapshot_path, seeds_path], outputs

    def _ecu(self):
        graph_path = self.require(self.path(f'{UPPER_GRAPH}.json'), 'execute a etapa upper antes')
        store = self.store
        graph, cu, common = load_upper_graph(graph_path, store)
        part = ecu_analysis.remove_common_paths(graph, common)
        records = ecu_analysis.find_ecu(part, cu)
        outputs = [self.path(f'{ECU}.json'), self.path(f'{ECU}.tsv'), self.path(RESIDUAL_GRAPH)]
        ecu_analysis.dump_ecu(outputs[0], records, store)
        ecu_analysis.write_ecu_table(outputs[1], records, store)
        exporters.write_dot(exporters.residual_digraph(part, records, store), outputs[2])
        return [self.config.snapshot_path, graph_path], outputs

    def selected_ecus(self, records):
        """ECUs dentro do limite ``max_nes`` (0 = sem limite)."""
        limit = self.config.max_nes
        if not limit:
            return list(records)
        skipped = [record for record in records if record.nes > limit]
        if skipped:
            logger.warning(f'{len(skipped)} ECU(s) com NES acima de {limit} ignoradas na coleta')
        return [record for record in records if record.nes <= limit]

    def _harvest(self):
        ecu_path = self.require(self.path(f'{ECU}.json'), 'execute a etapa ecu antes')
        store = self.store
        records = self.selected_ecus(ecu_analysis.load_ecu(ecu_path, store))
        with self.executor() as executor:
            harvests = list(executor.map(lambda record: expand_down(record, store), records))
        candidates, harvest_report = merge_harvests(harvests)
        write_candidates(self.path(CANDIDATES), candidates, store)
        write_harvest_report(self.path(HARVEST_REPORT), harvest_report, store)
        outputs = [self.path(CANDIDATES), self.path(HARVEST_REPORT)]
        if self.config.emit_sparql:
            outputs.append(self._write_sparql(records, store))
        return [self.config.snapshot_path, ecu_path], outputs

    def _write_sparql(self, records, store):
        directory = self.path(SPARQL_DIR)
        directory.mkdir(exist_ok=True)
        for stale in directory.glob('*.rq'):
            stale.unlink()
        for record in records:
            iri = store.iri(record.entity)
            for k in range(1, record.nes + 1):
                query = emit_sparql(iri, k, store.filter, self.config.prefixes)
                target = directory / f'{local_name(iri)}_k{k}.rq'
                target.write_text(query, encoding='utf-8')
        return directory

    def _trim(self):
        candidates_path = self.require(self.path(CANDIDATES), 'execute a etapa harvest antes')
        ecu_path = self.require(self.path(f'{ECU}.json'), 'execute a etapa ecu antes')
        seeds_path = self.require(self.path(SEEDS), 'execute a etapa link antes')
        store = self.store
        records = self.selected_ecus(ecu_analysis.load_ecu(ecu_path, store))
        candidates = read_candidates(candidates_path, store)
        harvests = harvests_from_candidates(candidates, records)
        seeds = read_seeds(seeds_path, store)
        kept, trim_report = trim_all(harvests, seeds, workers=self.workers)
        _, harvest_report = merge_harvests(harvests)
        write_candidates(self.path(TRIMMED), kept, store)
        write_trim_report(self.path(TRIM_REPORT), trim_report, store)
        write_harvest_report(
            self.path(NES_STATISTICS), harvest_report, store, trimmed=trim_report.statistics
        )
        return (
            [self.config.snapshot_path, candidates_path, ecu_path, seeds_path],
            [self.path(TRIMMED), self.path(TRIM_REPORT), self.path(NES_STATISTICS)],
        )

    def _eval(self):
        truth_path = self.require(self.config.ground_truth or None, 'paths.ground_truth')
        candidates_path = self.require(self.path(CANDIDATES), 'execute a etapa harvest antes')
        ecu_path = self.require(self.path(f'{ECU}.json'), 'execute a etapa ecu antes')
        store = self.store
        index_terms = load_terms_file(truth_path, case_fold=store.filter.case_fold, allow_empty=True)
        truth = build_ground_truth(index_terms, store)
        records = self.selected_ecus(ecu_analysis.load_ecu(ecu_path, store))
        inputs = [self.config.snapshot_path, truth_path, candidates_path, ecu_path]
        outputs = []
        tables = [(EVAL_ALL, candidates_path)]
        if self.config.trim:
            tables.append((EVAL_TRIMMED, self.require(self.path(TRIMMED), 'execute a etapa trim antes')))
            inputs.append(self.path(TRIMMED))
        for base, source in tables:
            rows = evaluate(read_candidates(source, store), truth, self.config.cutoffs, store, records)
            outputs.extend(report(rows, self.path(base)).values())
        return inputs, outputs

    # -- exportação ------------------------------------------------------------------

    def export(self, source, fmt, target=None):
        """Exporta o grafo superior ou um conjunto de candidatos no formato pedido."""
        if fmt not in exporters.EXPORT_FORMATS:
            raise exporters.UnknownFormatError(fmt)
        if source not in exporters.EXPORT_SOURCES:
            raise ValidationError({'source': f'Origem desconhecida: {source!r}'})
        self.prepare()
        store = self.store
        if source == 'graph':
            graph_path = self.require(self.path(f'{UPPER_GRAPH}.json'), 'execute a etapa upper antes')
            target = Path(target or self.path(f'export_graph.{fmt}'))
            graph, cu, common = load_upper_graph(graph_path, store)
            ecu_path = self.path(f'{ECU}.json')
            records = ecu_analysis.load_ecu(ecu_path, store) if ecu_path.exists() else []
            digraph = exporters.upper_digraph(graph, cu, common, store, records)
            return exporters.export_digraph(digraph, fmt, target)
        name = TRIMMED if self.config.trim and self.path(TRIMMED).exists() else CANDIDATES
        candidates_path = self.require(self.path(name), 'execute a etapa harvest antes')
        target = Path(target or self.path(f'export_candidates.{fmt}'))
        candidates = read_candidates(candidates_path, store)
        if fmt == 'jsonl':
            write_candidates(target, candidates, store)
        elif fmt == 'tsv':
            exporters.write_candidate_tsv(candidates, store, target)
        else:
            exporters.export_digraph(exporters.candidate_digraph(candidates, store), fmt, target)
        return target
