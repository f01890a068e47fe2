"""
Poda das subárvores coletadas com base nas entidades de busca.

NES = 1: tudo é mantido. Caso contrário, para cada semente encontrada numa
subárvore mantém-se a subárvore inteira do ancestral dois passos acima dela
(limitado ao filho direto da ECU) e o caminho da ECU até esse ancestral.
Subárvores sem sementes são descartadas.
"""
import logging
from collections import Counter, defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .harvest import ConceptCandidate, Provenance, SubtreeHarvest, harvest_statistics
from .linker import SearchEntitySet

logger = logging.getLogger(__name__)

RULE_ALL = 'nes1-all'
RULE_SEED_SUBTREE = 'seed-subtree'
RULE_TWO_ABOVE = 'two-above'
RULE_PATH = 'path-to-ecu'

ANCESTOR_STEPS = 2


@dataclass
class SubtreeView:
    ecu: object
    nes: int
    subtrees: dict

    @classmethod
    def from_harvest(cls, harvest):
        return cls(
            harvest.ecu.entity,
            harvest.ecu.nes,
            {subtree.root: subtree for subtree in harvest.subtrees},
        )

    @property
    def candidates(self):
        return {node for subtree in self.subtrees.values() for node in subtree.depth}

    def restrict(self, kept):
        """Visão contendo apenas os nós mantidos."""
        subtrees = {}
        for root, subtree in self.subtrees.items():
            depth = {n: d for n, d in subtree.depth.items() if n in kept}
            if depth:
                parents = {
                    n: tuple(p for p in subtree.parents[n] if p in kept or p == self.ecu)
                    for n in depth
                }
                links = {
                    n: tuple(p for p in subtree.links.get(n, ()) if p in kept)
                    for n in depth
                }
                subtrees[root] = SubtreeHarvest(
                    root, depth, parents, {n: found for n, found in links.items() if found}
                )
        return SubtreeView(self.ecu, self.nes, subtrees)


def seed_ids(seeds):
    if isinstance(seeds, SearchEntitySet):
        return set(seeds.seeds)
    return set(seeds)


def _descendants(anchors, children):
    seen = set(anchors)
    queue = deque(anchors)
    while queue:
        node = queue.popleft()
        for child in children.get(node, ()):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return seen


def _ancestors(anchors, subtree):
    seen = set()
    queue = deque(anchors)
    while queue:
        node = queue.popleft()
        for parent in subtree.parents.get(node, ()):
            if parent in subtree.depth and parent not in seen:
                seen.add(parent)
                queue.append(parent)
    return seen


def trim_subtree(subtree, nes, seeds):
    """Nós mantidos de uma subárvore, cada um com as regras que o mantiveram."""
    if nes <= 1:
        return {node: {RULE_ALL} for node in subtree.depth}
    kept = defaultdict(set)
    children = subtree.children()
    for seed in sorted(node for node in subtree.depth if node in seeds):
        seed_depth = subtree.depth[seed]
        anchors = {seed}
        for _ in range(min(ANCESTOR_STEPS, seed_depth - 1)):
            anchors = {
                parent for node in anchors for parent in subtree.parents.get(node, ())
                if parent in subtree.depth
            }
        if not anchors:
            anchors = {subtree.root}
        rule = RULE_SEED_SUBTREE if seed_depth <= ANCESTOR_STEPS else RULE_TWO_ABOVE
        for node in _descendants(anchors, children):
            kept[node].add(rule)
        for node in _ancestors(anchors, subtree):
            kept[node].add(RULE_PATH)
    return dict(kept)


def trim(view, nes, seeds):
    """União das subárvores mantidas de uma ECU."""
    seeds = seed_ids(seeds)
    kept = defaultdict(set)
    for subtree in view.subtrees.values():
        for node, rules in trim_subtree(subtree, nes, seeds).items():
            kept[node].update(rules)
    return {node: frozenset(rules) for node, rules in kept.items()}


@dataclass
class TrimReport:
    per_ecu: list = field(default_factory=list)
    ecu_nodes: int = 0
    total_unique_kept: int = 0
    statistics: tuple = ({}, {}, {})


def _trim_harvest(harvest, seeds):
    view = SubtreeView.from_harvest(harvest)
    entries = []
    rules = Counter()
    total = 0
    for root, subtree in sorted(view.subtrees.items()):
        kept = trim_subtree(subtree, view.nes, seeds)
        total += len(subtree.depth)
        for node, node_rules in kept.items():
            rules.update(node_rules)
            entries.append((node, node_rules, Provenance(
                view.ecu, subtree.depth[node], root, view.nes, subtree.parents[node],
                subtree.links.get(node, ()),
            )))
    row = {
        'ecu': view.ecu,
        'nes': view.nes,
        'total': total,
        'kept': len(entries),
        'dropped': total - len(entries),
        'rules': dict(sorted(rules.items())),
    }
    return entries, row


def trim_all(harvests, seeds, workers=1):
    """Poda por ECU e união global: um candidato mantido por qualquer ECU sobrevive."""
    seeds = seed_ids(seeds)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(lambda h: _trim_harvest(h, seeds), harvests))
    kept = {}
    report = TrimReport(ecu_nodes=len(harvests))
    for entries, row in results:
        report.per_ecu.append(row)
        for node, rules, provenance in entries:
            candidate = kept.setdefault(node, ConceptCandidate(node))
            candidate.provenance.append(provenance)
            candidate.kept_by = candidate.kept_by | frozenset(rules)
    for candidate in kept.values():
        candidate.provenance.sort()
    report.total_unique_kept = len(kept)
    report.statistics = harvest_statistics(kept, [h.ecu for h in harvests])
    logger.info(f'Poda concluída: {len(kept):,} conceitos únicos mantidos')
    return dict(sorted(kept.items())), report


def write_trim_report(path, report, store):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write('ecu\tnes\ttotal\tkept\tdropped\trules\n')
        for row in report.per_ecu:
            rules = ','.join(f'{rule}={count}' for rule, count in row['rules'].items())
            fh.write(
                f"{store.iri(row['ecu'])}\t{row['nes']}\t{row['total']}\t"
                f"{row['kept']}\t{row['dropped']}\t{rules}\n"
            )
        fh.write(f'(ecu nodes)\t\t{report.ecu_nodes}\t{report.ecu_nodes}\t0\t\n')
        fh.write(f'(unique kept)\t\t\t{report.total_unique_kept}\t\t\n')
