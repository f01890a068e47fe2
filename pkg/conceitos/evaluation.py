"""
Avaliação: gabarito a partir de um índice de termos e tabelas de revocação e
precisão por corte cumulativo de NES.
"""
import csv
import logging
from dataclasses import dataclass
from typing import NamedTuple

from .triplestore import LABEL_KINDS

logger = logging.getLogger(__name__)

TSV_COLUMNS = (
    'cutoff', 'ecuCount', 'conceptCount', 'termCount', 'matched', 'recall', 'precision',
)


@dataclass(frozen=True)
class GroundTruth:
    terms: tuple
    matched: frozenset

    @property
    def total(self):
        return len(self.matched)


class EvalRow(NamedTuple):
    cutoff: int
    ecu_count: int
    concept_count: int
    term_count: int
    matched: int
    recall: float
    precision: float


def build_ground_truth(index_terms, store, kinds=LABEL_KINDS):
    """Gabarito: termos do índice com ao menos um rótulo ou alias idêntico no LOD."""
    terms = tuple(index_terms)
    matched = frozenset(term for term in terms if store.lookup_label(term, kinds))
    if not matched:
        logger.warning('Nenhum termo do gabarito encontrado no LOD; avaliação degenerada')
    else:
        logger.info(f'Gabarito: {len(matched):,} de {len(terms):,} termos presentes no LOD')
    return GroundTruth(terms, matched)


def _ratio(numerator, denominator):
    return numerator / denominator if denominator else 0.0


def evaluate(candidates, truth, cutoffs, store, ecus=None, kinds=LABEL_KINDS):
    """Uma linha por corte n: candidatos cujo menor NES é <= n.

    ``ecus`` (registros de ECU) fornece a contagem de ECUs por corte; sem ele a
    contagem vem da proveniência dos candidatos.
    """
    if ecus is not None:
        ecu_nes = {ecu.entity: ecu.nes for ecu in ecus}
    else:
        ecu_nes = {}
        for candidate in candidates.values():
            for p in candidate.provenance:
                ecu_nes[p.ecu] = p.nes
    by_nes = sorted(
        (candidate.min_nes, entity, store.labels(entity, kinds))
        for entity, candidate in candidates.items()
    )
    rows = []
    pool = set()
    concepts = 0
    position = 0
    for cutoff in sorted(set(cutoffs)):
        while position < len(by_nes) and by_nes[position][0] <= cutoff:
            pool.update(by_nes[position][2])
            concepts += 1
            position += 1
        matched = len(pool & truth.matched)
        rows.append(EvalRow(
            cutoff=cutoff,
            ecu_count=sum(1 for nes in ecu_nes.values() if nes <= cutoff),
            concept_count=concepts,
            term_count=len(pool),
            matched=matched,
            recall=_ratio(matched, truth.total),
            precision=_ratio(matched, len(pool)),
        ))
    return rows


def percent(value):
    """Percentual com três algarismos significativos (ex.: 0.00177 → '0.177%')."""
    return format(value * 100, '#.3g').rstrip('.') + '%'


def report(rows, base_path):
    """Grava ``<base>.tsv``, ``<base>.txt`` (tabela legível) e ``<base>.csv`` (série)."""
    if not rows:
        raise ValueError('Nenhuma linha de avaliação para relatar')
    rows = sorted(rows, key=lambda row: row.cutoff)
    paths = {ext: f'{base_path}.{ext}' for ext in ('tsv', 'txt', 'csv')}

    with open(paths['tsv'], 'w', encoding='utf-8', newline='') as fh:
        fh.write('\t'.join(TSV_COLUMNS) + '\n')
        for row in rows:
            fh.write(
                f'{row.cutoff}\t{row.ecu_count}\t{row.concept_count}\t{row.term_count}\t'
                f'{row.matched}\t{row.recall:.6f}\t{row.precision:.6f}\n'
            )

    header = ('NES<=', 'ECUs', 'Conceitos', 'Termos', 'Acertos', 'Revocação', 'Precisão')
    table = [header] + [
        (
            str(row.cutoff), f'{row.ecu_count:,}', f'{row.concept_count:,}',
            f'{row.term_count:,}', f'{row.matched:,}', percent(row.recall),
            percent(row.precision),
        )
        for row in rows
    ]
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    with open(paths['txt'], 'w', encoding='utf-8', newline='') as fh:
        for number, line in enumerate(table):
            fh.write('  '.join(cell.rjust(width) for cell, width in zip(line, widths)) + '\n')
            if number == 0:
                fh.write('  '.join('-' * width for width in widths) + '\n')

    with open(paths['csv'], 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['cutoff', 'conceptCount', 'recall', 'precision'])
        for row in rows:
            writer.writerow([
                row.cutoff, row.concept_count, f'{row.recall:.6f}', f'{row.precision:.6f}'
            ])
    return paths
