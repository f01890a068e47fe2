from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Lê o(s) dump(s) N-Triples e grava o snapshot do store e o relatório de ingestão.'
    stage = 'ingest'
    option_keys = {'dump': ('paths', 'dump')}

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('--dump', nargs='+', help='Um ou mais arquivos .nt ou .nt.gz')
