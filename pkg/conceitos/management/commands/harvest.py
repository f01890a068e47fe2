from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Coleta os conceitos inferiores de cada ECU até o seu NES.'
    stage = 'harvest'
    option_keys = {
        'max_nes': ('analysis', 'max_nes'),
        'emit_sparql': ('run', 'emit_sparql'),
    }

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('--max-nes', type=int, help='Ignora ECUs com NES acima (0 = sem limite)')
        parser.add_argument(
            '--no-sparql', action='store_false', dest='emit_sparql', default=None,
            help='Não grava as consultas SPARQL por ECU',
        )
