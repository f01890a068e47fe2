import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from conceitos.linker import (
    ADJACENT_BLACKLIST, EXCLUDED, KEPT, NO_HIERARCHY, PROPERTY_BLACKLIST, UNMATCHED, ExclusionPolicy,
    TermListError, apply_exclusions, link_terms, load_terms, load_terms_file, read_seeds,
    write_search_entities, write_seeds,
)
from conceitos.triplestore import REPRESENTATIVE

from .fixtures import P131, P31, build_store, ids, iri, names

POLICY = ExclusionPolicy(
    adjacent_blacklist={iri('Q11879590')},
    adjacency_predicates={P31},
    property_blacklist={P131},
)


class LoadTermsTests(SimpleTestCase):

    def test_normalizes_and_deduplicates(self):
        terms = load_terms(['\u3000ポリマー\u3000', 'ポリマー', '', '# comentário', 'モノマー'])
        self.assertEqual(terms.terms, ('ポリマー', 'モノマー'))

    def test_empty_list_rejected(self):
        with self.assertRaises(TermListError):
            load_terms(['', '   ', '# só comentário'], provenance='vazio.txt')

    def test_empty_list_allowed_when_asked(self):
        self.assertEqual(len(load_terms([], allow_empty=True)), 0)

    def test_file_with_bom(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'termos.txt'
            path.write_text('\ufeffpoly\nmono\n', encoding='utf-8')
            terms = load_terms_file(path)
        self.assertEqual(terms.terms, ('poly', 'mono'))
        self.assertEqual(terms.provenance, 'termos.txt')


class ExclusionTests(SimpleTestCase):

    def setUp(self):
        self.store = build_store(
            edges=[
                ('Hana', 'P31', 'Q11879590'),
                ('Hana2', 'P279', 'Flower'),
                ('Town', 'P31', 'Place'),
                ('Poly', 'P279', 'Material'),
            ],
            labels=[
                ('Hana', 'hana'), ('Hana2', 'hana'), ('Lonely', 'hana'),
                ('Town', 'town'), ('Poly', 'poly'),
            ],
            properties=[('Town', 'P131', 'Prefecture')],
        )

    def link(self, *terms):
        return apply_exclusions(link_terms(terms, self.store), POLICY, self.store)

    def test_homonym_of_given_name_is_excluded(self):
        result = self.link('hana')
        self.assertEqual(names(self.store, result.entries['hana']), {'Hana2'})
        (hana,) = ids(self.store, 'Hana')
        (row,) = [row for row in result.audit if row.entity == hana]
        self.assertEqual(row.status, EXCLUDED)
        self.assertEqual(row.reason, ADJACENT_BLACKLIST)
        self.assertIn(iri('Q11879590'), row.detail)

    def test_entity_without_hierarchy_is_excluded(self):
        result = self.link('hana')
        (lonely,) = ids(self.store, 'Lonely')
        self.assertNotIn(lonely, result)
        (row,) = [row for row in result.audit if row.entity == lonely]
        self.assertEqual(row.reason, NO_HIERARCHY)

    def test_property_blacklist(self):
        result = self.link('town')
        self.assertEqual(result.entries['town'], ())
        (row,) = result.audit_for('town')
        self.assertEqual((row.status, row.reason, row.detail), (EXCLUDED, PROPERTY_BLACKLIST, P131))

    def test_unmatched_term_is_audited(self):
        result = self.link('inexistente')
        self.assertEqual(result.entries['inexistente'], ())
        (row,) = result.audit_for('inexistente')
        self.assertEqual(row.status, UNMATCHED)
        self.assertIsNone(row.entity)

    def test_audit_is_complete(self):
        terms = ('hana', 'town', 'poly', 'inexistente')
        candidates = link_terms(terms, self.store, workers=3)
        result = apply_exclusions(candidates, POLICY, self.store)
        for term in terms:
            audited = {row.entity for row in result.audit_for(term)}
            expected = set(candidates[term]) or {None}
            self.assertEqual(audited, expected)
        kept = {row.entity for row in result.audit if row.status == KEPT}
        self.assertEqual(set(result.seeds), kept)

    def test_representative_only_lookup(self):
        store = build_store(edges=[('Poly', 'P279', 'Material')], aliases=[('Poly', 'pol')])
        self.assertEqual(link_terms(['pol'], store, kinds=(REPRESENTATIVE,))['pol'], [])

    def test_invalid_policy_names_field(self):
        with self.assertRaises(ValidationError) as cm:
            ExclusionPolicy(adjacent_blacklist={'não é iri'}).clean()
        self.assertIn('adjacent_blacklist', cm.exception.message_dict)


class SeedFileTests(SimpleTestCase):

    def test_seed_file_round_trip_and_search_table(self):
        store = build_store(
            edges=[('Poly', 'P279', 'Material'), ('Mono', 'P279', 'Material')],
            labels=[('Poly', 'poly'), ('Mono', 'mono')],
        )
        result = apply_exclusions(link_terms(['poly', 'mono', 'nada'], store), POLICY, store)
        with tempfile.TemporaryDirectory() as tmp:
            seeds_path = Path(tmp) / 'seeds.txt'
            table_path = Path(tmp) / 'search_entities.tsv'
            write_seeds(result, store, seeds_path)
            write_search_entities(result, store, table_path)
            self.assertEqual(read_seeds(seeds_path, store), result.seeds)
            rows = table_path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(rows[0], 'term\tentity\tstatus\treason\tdetail')
        self.assertEqual(len(rows), 4)
        self.assertIn(f'poly\t{iri("Poly")}\tkept\t\t', rows)
        self.assertIn('nada\t\tunmatched\tunmatched\t', rows)
