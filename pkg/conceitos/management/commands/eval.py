from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Calcula revocação e precisão por corte cumulativo de NES.'
    stage = 'eval'
    option_keys = {
        'ground_truth': ('paths', 'ground_truth'),
        'cutoffs': ('run', 'cutoffs'),
        'trim': ('run', 'trim'),
    }

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('--ground-truth', help='Índice de termos usado como gabarito')
        parser.add_argument('--cutoffs', nargs='+', type=int)
        parser.add_argument(
            '--no-trim', action='store_false', dest='trim', default=None,
            help='Considera apenas o conjunto completo de candidatos',
        )
