import tempfile
from pathlib import Path

import networkx as nx
from django.test import SimpleTestCase

from conceitos.ecu import find_ecu, remove_common_paths
from conceitos.exporters import (
    UnknownFormatError, candidate_digraph, export_digraph, residual_digraph, tsv_field,
    upper_digraph, write_candidate_tsv,
)
from conceitos.harvest import expand_down, merge_harvests
from conceitos.upper_graph import find_common_paths, find_cu, integrate, trace_all

from .fixtures import G1_EDGES, G1_SEEDS, G3_EDGES, P279, ecu_record, ids, iri, store_from_edges


class UpperGraphExportTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.store = store_from_edges(G1_EDGES)
        graph = integrate(trace_all(ids(self.store, *G1_SEEDS), self.store))
        cu = find_cu(graph)
        common = find_common_paths(graph, cu)
        self.part = remove_common_paths(graph, common)
        self.ecus = find_ecu(self.part, cu)
        self.digraph = upper_digraph(graph, cu, common, self.store, self.ecus)

    def path(self, name):
        return Path(self.tmp.name) / name

    def test_attributes(self):
        self.assertEqual(self.digraph.number_of_nodes(), 7)
        self.assertEqual(self.digraph.number_of_edges(), 6)
        node = self.digraph.nodes[iri('A')]
        self.assertEqual((node['support'], node['cu'], node['ecu']), (2, True, True))
        self.assertFalse(self.digraph.nodes[iri('C')]['cu'])
        edge = self.digraph.edges[iri('B'), iri('R')]
        self.assertEqual((edge['support'], edge['common'], edge['predicates']), (3, True, P279))

    def test_dot(self):
        export_digraph(self.digraph, 'dot', self.path('g.dot'))
        lines = self.path('g.dot').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'digraph "upper_graph" {')
        self.assertEqual(lines[-1], '}')
        edges = [line for line in lines if ' -> ' in line]
        nodes = [line for line in lines[2:-1] if ' -> ' not in line]
        self.assertEqual((len(nodes), len(edges)), (7, 6))
        self.assertEqual(sum('style="bold"' in line for line in edges), 2)
        self.assertTrue(any(line.startswith(f'  "{iri("S1")}" -> "{iri("A")}"') for line in edges))

    def test_graphml_round_trip(self):
        export_digraph(self.digraph, 'graphml', self.path('g.graphml'))
        loaded = nx.read_graphml(self.path('g.graphml'))
        self.assertEqual(set(loaded.nodes), set(self.digraph.nodes))
        self.assertEqual(set(loaded.edges), set(self.digraph.edges))
        self.assertEqual(loaded.nodes[iri('B')]['support'], 3)
        self.assertIs(loaded.nodes[iri('B')]['cu'], True)

    def test_edge_tsv(self):
        export_digraph(self.digraph, 'tsv', self.path('g.tsv'))
        rows = self.path('g.tsv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(rows[0], 'child\tparent\tcommon\tpredicates\tsupport')
        self.assertEqual(len(rows), 7)
        self.assertIn(f'{iri("B")}\t{iri("R")}\tTrue\t{P279}\t3', rows)

    def test_residual_graph(self):
        digraph = residual_digraph(self.part, self.ecus, self.store)
        self.assertEqual(digraph.number_of_nodes(), 7)
        self.assertEqual(digraph.number_of_edges(), 4)
        self.assertTrue(digraph.nodes[iri('S1')]['seed'])

    def test_unknown_format(self):
        with self.assertRaises(UnknownFormatError):
            export_digraph(self.digraph, 'xml', self.path('g.xml'))


class CandidateExportTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.store = store_from_edges(G3_EDGES)
        self.candidates, _ = merge_harvests([expand_down(ecu_record(self.store, 'E', 3), self.store)])

    def test_candidate_graph_includes_ecu_as_parent(self):
        digraph = candidate_digraph(self.candidates, self.store)
        self.assertEqual(digraph.number_of_nodes(), 6)
        self.assertEqual(digraph.number_of_edges(), 5)
        self.assertIn((iri('X'), iri('E')), digraph.edges)

    def test_empty_jsonl(self):
        path = Path(self.tmp.name) / 'vazio.jsonl'
        export_digraph(candidate_digraph({}, self.store), 'jsonl', path)
        self.assertEqual(path.read_text(encoding='utf-8'), '')

    def test_candidate_tsv(self):
        path = Path(self.tmp.name) / 'c.tsv'
        write_candidate_tsv(self.candidates, self.store, path)
        rows = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(rows[0], 'iri\tlabel\tdepth\tminNes\tecus\tkeptBy')
        self.assertEqual(len(rows), 6)
        self.assertIn(f'{iri("s")}\t{iri("s")}\t3\t3\t{iri("E")}\t', rows)

    def test_tsv_field(self):
        self.assertEqual(tsv_field('a\tb\nc'), 'a b c')
