from conceitos.exporters import EXPORT_FORMATS, EXPORT_SOURCES, UnknownFormatError
from conceitos.pipeline import StageError
from conceitos.triplestore import SnapshotError

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = (
        'Exporta o grafo superior (graph) ou os candidatos (candidates) em '
        f'{"/".join(EXPORT_FORMATS)}.'
    )
    stage = 'export'

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('source', help=f'Artefato: {" ou ".join(EXPORT_SOURCES)}')
        parser.add_argument('--format', default='dot', dest='fmt', help='Formato de saída')
        parser.add_argument('--output', '-o', help='Arquivo de destino')

    def execute_pipeline(self, manager, options):
        try:
            return manager.export(options['source'], options['fmt'], options.get('output'))
        except UnknownFormatError:
            raise
        except (OSError, ValueError, SnapshotError) as e:
            raise StageError(self.stage, e) from e

    def report(self, manager, result):
        self.stdout.write(self.style.SUCCESS(f'Exportado: {result}'))
