from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Rastreia as sementes para cima e identifica entidades CU e caminhos comuns.'
    stage = 'upper'
    option_keys = {
        'cu_threshold': ('analysis', 'cu_threshold'),
        'common_path_threshold': ('analysis', 'common_path_threshold'),
        'max_depth': ('analysis', 'max_depth'),
    }

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('--cu-threshold', type=int)
        parser.add_argument('--common-path-threshold', type=int)
        parser.add_argument('--max-depth', type=int)
