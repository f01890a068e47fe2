import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from conceitos.harvest import expand_down
from conceitos.linker import SearchEntitySet
from conceitos.trimming import (
    RULE_ALL, RULE_PATH, RULE_SEED_SUBTREE, RULE_TWO_ABOVE, SubtreeView, trim, trim_all,
    write_trim_report,
)

from .fixtures import (
    G2_EDGES, G3_EDGES, SHORTCUT_EDGES, ecu_record, ids, iri, names, store_from_edges,
)


def view_for(edges, ecu, nes):
    store = store_from_edges(edges)
    return store, SubtreeView.from_harvest(expand_down(ecu_record(store, ecu, nes), store))


class TrimTests(SimpleTestCase):

    def test_g2_keeps_seed_subtree(self):
        store, view = view_for(G2_EDGES, 'E', 2)
        kept = trim(view, 2, ids(store, 's'))
        self.assertEqual(names(store, kept), {'X', 's'})
        self.assertEqual(set(kept.values()), {frozenset({RULE_SEED_SUBTREE})})

    def test_g3_keeps_two_above(self):
        store, view = view_for(G3_EDGES, 'E', 3)
        kept = trim(view, 3, ids(store, 's'))
        self.assertEqual(names(store, kept), {'X', 'Y', 's'})
        self.assertTrue(all(RULE_TWO_ABOVE in rules for rules in kept.values()))

    def test_deep_seed_keeps_path_to_ecu(self):
        store, view = view_for([
            ('X', 'P279', 'E'), ('Y', 'P279', 'X'), ('Z', 'P279', 'Y'), ('s', 'P279', 'Z'),
            ('W', 'P279', 'Y'), ('V', 'P279', 'X'),
        ], 'E', 4)
        kept = trim(view, 4, ids(store, 's'))
        self.assertEqual(names(store, kept), {'X', 'Y', 'Z', 'W', 's'})
        (x,) = ids(store, 'X')
        self.assertEqual(kept[x], frozenset({RULE_PATH}))

    def test_anchor_subtree_includes_child_with_shallower_parent(self):
        store, view = view_for(SHORTCUT_EDGES, 'E', 4)
        kept = trim(view, 4, ids(store, 's'))
        self.assertEqual(names(store, kept), {'X', 'Y', 'Z', 's', 'N'})
        x, n = ids(store, 'X', 'N')
        self.assertEqual(kept[n], frozenset({RULE_TWO_ABOVE}))
        self.assertEqual(kept[x], frozenset({RULE_PATH}))

    def test_single_step_keeps_everything(self):
        store, view = view_for([('a', 'P279', 'E'), ('b', 'P279', 'E')], 'E', 1)
        kept = trim(view, 1, set())
        self.assertEqual(names(store, kept), {'a', 'b'})
        self.assertEqual(set(kept.values()), {frozenset({RULE_ALL})})

    def test_seedless_ecu_keeps_nothing(self):
        _, view = view_for(G3_EDGES, 'E', 3)
        self.assertEqual(trim(view, 3, set()), {})

    def test_seed_at_root_keeps_whole_subtree(self):
        store, view = view_for(G3_EDGES, 'E', 3)
        kept = trim(view, 3, ids(store, 'Z'))
        self.assertEqual(names(store, kept), {'Z', 'W'})

    def test_result_is_subset_and_idempotent(self):
        store, view = view_for(G3_EDGES + [('s2', 'P279', 'W')], 'E', 3)
        seeds = set(ids(store, 's', 's2'))
        kept = trim(view, 3, seeds)
        self.assertLessEqual(set(kept), view.candidates)
        again = trim(view.restrict(set(kept)), 3, seeds)
        self.assertEqual(set(again), set(kept))

    def test_accepts_search_entity_set(self):
        store, view = view_for(G2_EDGES, 'E', 2)
        (s,) = ids(store, 's')
        seeds = SearchEntitySet(entries={'s': (s,)})
        self.assertEqual(names(store, trim(view, 2, seeds)), {'X', 's'})


class TrimAllTests(SimpleTestCase):

    def setUp(self):
        self.store = store_from_edges([
            ('X', 'P279', 'E1'), ('s', 'P279', 'X'), ('Y', 'P279', 'E1'), ('t', 'P279', 'Y'),
            ('P', 'P279', 'E2'), ('Q', 'P279', 'P'), ('s', 'P279', 'Q'),
            ('Z', 'P279', 'E2'), ('W', 'P279', 'Z'),
            ('a', 'P279', 'E3'),
        ])
        self.harvests = [
            expand_down(ecu_record(self.store, 'E1', 2), self.store),
            expand_down(ecu_record(self.store, 'E2', 3), self.store),
            expand_down(ecu_record(self.store, 'E3', 1), self.store),
        ]
        self.seeds = ids(self.store, 's')

    def test_union_over_ecus(self):
        kept, _ = trim_all(self.harvests, self.seeds)
        self.assertEqual(names(self.store, kept), {'X', 's', 'P', 'Q', 'a'})
        (s,) = ids(self.store, 's')
        self.assertEqual(names(self.store, kept[s].ecus), {'E1', 'E2'})
        self.assertEqual(kept[s].kept_by, frozenset({RULE_SEED_SUBTREE, RULE_TWO_ABOVE}))

    def test_worker_count_does_not_change_result(self):
        one, _ = trim_all(self.harvests, self.seeds)
        many, _ = trim_all(self.harvests, self.seeds, workers=3)
        self.assertEqual(
            {e: (c.provenance, c.kept_by) for e, c in one.items()},
            {e: (c.provenance, c.kept_by) for e, c in many.items()},
        )

    def test_report(self):
        _, report = trim_all(self.harvests, self.seeds)
        self.assertEqual(report.ecu_nodes, 3)
        self.assertEqual(report.total_unique_kept, 5)
        by_ecu = {self.store.iri(row['ecu']): row for row in report.per_ecu}
        self.assertEqual(
            (by_ecu[iri('E1')]['total'], by_ecu[iri('E1')]['kept'], by_ecu[iri('E1')]['dropped']),
            (4, 2, 2),
        )
        self.assertEqual(by_ecu[iri('E3')]['rules'], {RULE_ALL: 1})
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'trim_report.tsv'
            write_trim_report(path, report, self.store)
            rows = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(rows[0], 'ecu\tnes\ttotal\tkept\tdropped\trules')
        self.assertIn(f'{iri("E1")}\t2\t4\t2\t2\t{RULE_SEED_SUBTREE}=2', rows)
        self.assertEqual(rows[-1], '(unique kept)\t\t\t5\t\t')
