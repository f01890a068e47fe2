import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from conceitos.config import SNAPSHOT_NAME, PipelineConfig, expand_iri

from .fixtures import P131, P21, P279, P31, WD, iri


class ConfigTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_ini(self, text):
        path = Path(self.tmp.name) / 'pipeline.ini'
        path.write_text(text, encoding='utf-8')
        return path

    def test_defaults_from_settings(self):
        config = PipelineConfig.load()
        config.clean()
        self.assertEqual(config.cu_threshold, 2)
        self.assertEqual(config.filter.subclass_predicates, {P279})
        self.assertEqual(config.filter.instance_predicates, {P31})
        self.assertEqual(config.filter.extra_predicates, {P131, P21})
        self.assertEqual(config.exclusion.adjacency_predicates, {P31})
        self.assertIn(iri('Q5'), config.exclusion.adjacent_blacklist)
        self.assertEqual(config.prefixes['wd'], WD)
        self.assertEqual(config.snapshot_path, Path(config.output_dir) / SNAPSHOT_NAME)

    def test_ini_overrides_and_compact_iris(self):
        path = self.write_ini(
            '[sparql]\n'
            'ex = http://example.org/\n'
            '[analysis]\n'
            'cu_threshold = 3\n'
            '[exclusion]\n'
            'adjacent_blacklist = wd:Q5, <http://example.org/outro>\n'
            'property_blacklist = ex:p\n'
            '[run]\n'
            'cutoffs = 1 3\n'
            'trim = no\n'
        )
        config = PipelineConfig.load(path)
        self.assertEqual(config.cu_threshold, 3)
        self.assertEqual(config.exclusion.adjacent_blacklist, {iri('Q5'), 'http://example.org/outro'})
        self.assertEqual(config.exclusion.property_blacklist, {'http://example.org/p'})
        self.assertIn('http://example.org/p', config.filter.extra_predicates)
        self.assertEqual(config.cutoffs, (1, 3))
        self.assertFalse(config.trim)
        self.assertEqual(config.source, str(path))

    def test_command_line_overrides_win(self):
        path = self.write_ini('[analysis]\ncu_threshold = 3\n')
        config = PipelineConfig.load(path, {
            ('analysis', 'cu_threshold'): 4,
            ('analysis', 'max_depth'): None,
        })
        self.assertEqual(config.cu_threshold, 4)
        self.assertEqual(config.max_depth, 30)

    def test_unknown_key_is_named(self):
        path = self.write_ini('[analysis]\nlimiar = 3\n')
        with self.assertRaises(ValidationError) as cm:
            PipelineConfig.load(path)
        self.assertIn('analysis.limiar', cm.exception.message_dict)

    def test_unknown_section_is_named(self):
        path = self.write_ini('[outra]\nchave = 1\n')
        with self.assertRaises(ValidationError) as cm:
            PipelineConfig.load(path)
        self.assertIn('outra', cm.exception.message_dict)

    def test_bad_integer_is_named(self):
        path = self.write_ini('[analysis]\ncu_threshold = muitos\n')
        with self.assertRaises(ValidationError) as cm:
            PipelineConfig.load(path)
        self.assertIn('analysis.cu_threshold', cm.exception.message_dict)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            PipelineConfig.load(Path(self.tmp.name) / 'nao_existe.ini')

    def test_clean_rejects_zero_threshold(self):
        config = PipelineConfig.load(overrides={('analysis', 'cu_threshold'): 0})
        with self.assertRaises(ValidationError) as cm:
            config.clean()
        self.assertIn('cu_threshold', cm.exception.message_dict)

    def test_clean_rejects_adjacency_outside_hierarchy(self):
        config = PipelineConfig.load(overrides={('exclusion', 'adjacency_predicates'): ['wdt:P131']})
        with self.assertRaises(ValidationError) as cm:
            config.clean()
        self.assertIn('adjacency_predicates', cm.exception.message_dict)

    def test_fingerprint_ignores_paths_and_workers(self):
        base = PipelineConfig.load().fingerprint()
        moved = PipelineConfig.load(overrides={
            ('paths', 'output_dir'): '/tmp/outro', ('run', 'workers'): 8,
            ('paths', 'snapshot'): '/tmp/x.hier',
        })
        self.assertEqual(moved.fingerprint(), base)
        changed = PipelineConfig.load(overrides={('analysis', 'cu_threshold'): 3})
        self.assertNotEqual(changed.fingerprint(), base)
        self.assertEqual(len(base), 64)


class ExpandIriTests(SimpleTestCase):

    def test_forms(self):
        prefixes = {'wd': WD}
        self.assertEqual(expand_iri('wd:Q5', prefixes), iri('Q5'))
        self.assertEqual(expand_iri('<http://x.org/a>', prefixes), 'http://x.org/a')
        self.assertEqual(expand_iri('http://x.org/a', prefixes), 'http://x.org/a')
        self.assertEqual(expand_iri('zz:Q5', prefixes), 'zz:Q5')
