from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Liga os termos do domínio a entidades do LOD e aplica os modelos de exclusão.'
    stage = 'link'
    option_keys = {'terms': ('paths', 'terms')}

    @staticmethod
    def add_stage_arguments(parser):
        parser.add_argument('--terms', help='Lista de termos (UTF-8, um por linha)')
