from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Poda as subárvores coletadas de acordo com as entidades de busca.'
    stage = 'trim'
