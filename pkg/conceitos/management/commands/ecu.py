from ._base import PipelineCommand


class Command(PipelineCommand):
    help = 'Remove os caminhos comuns, particiona o resíduo e calcula ECUs e NES.'
    stage = 'ecu'
