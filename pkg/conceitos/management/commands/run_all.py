from . import eval as eval_command
from . import harvest, ingest, link, upper
from ._base import PipelineCommand

_STAGE_COMMANDS = (
    ingest.Command, link.Command, upper.Command, harvest.Command, eval_command.Command,
)


class Command(PipelineCommand):
    help = 'Executa todas as etapas em sequência e grava o manifest.json.'
    stage = 'run_all'
    option_keys = {
        key: target for command in _STAGE_COMMANDS for key, target in command.option_keys.items()
    }

    @staticmethod
    def add_stage_arguments(parser):
        for command in _STAGE_COMMANDS:
            command.add_stage_arguments(parser)

    def execute_pipeline(self, manager, options):
        return manager.run_all()

    def report(self, manager, result):
        for name, entry in result['stages'].items():
            self.stdout.write(f'{name}: {len(entry["outputs"])} artefato(s)')
        self.stdout.write(self.style.SUCCESS(
            f'Pipeline concluído; manifesto em {manager.out / "manifest.json"}'
        ))
