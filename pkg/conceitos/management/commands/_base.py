"""
Base comum dos subcomandos do pipeline.

Códigos de saída: 2 para entrada ausente, 1 para configuração inválida (ou
formato de exportação desconhecido), 3 para falha interna de uma etapa.
"""
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from conceitos.config import PipelineConfig
from conceitos.exporters import UnknownFormatError
from conceitos.pipeline import MissingInputError, PipelineManager, StageError

logger = logging.getLogger('conceitos.comandos')

EXIT_CONFIG = 1
EXIT_MISSING_INPUT = 2
EXIT_STAGE = 3


def describe_validation(error):
    if hasattr(error, 'error_dict'):
        return '; '.join(
            f'{field}: {" ".join(messages)}' for field, messages in error.message_dict.items()
        )
    return ' '.join(error.messages)


class PipelineCommand(BaseCommand):
    stage = None
    option_keys = {}

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Arquivo INI que sobrescreve os padrões do settings')
        parser.add_argument(
            '--workers', type=int,
            help='Workers paralelos (processos na ingestão, threads nas demais etapas)',
        )
        parser.add_argument('--snapshot', help='Caminho do snapshot do store')
        parser.add_argument('--out', help='Diretório de saída dos artefatos')
        self.add_stage_arguments(parser)

    @staticmethod
    def add_stage_arguments(parser):
        pass

    def overrides(self, options):
        """Mapa {(seção, chave): valor} das opções da linha de comando."""
        overrides = {
            ('paths', 'snapshot'): options.get('snapshot'),
            ('paths', 'output_dir'): options.get('out'),
            ('run', 'workers'): options.get('workers'),
        }
        for option, target in self.option_keys.items():
            overrides[target] = options.get(option)
        return overrides

    def load_config(self, options):
        try:
            config = PipelineConfig.load(options.get('config'), self.overrides(options))
            config.clean()
        except ValidationError as e:
            raise CommandError(
                f'Configuração inválida: {describe_validation(e)}', returncode=EXIT_CONFIG
            )
        except FileNotFoundError as e:
            raise CommandError(f'Entrada ausente: {e.filename}', returncode=EXIT_MISSING_INPUT)
        return config

    def execute_pipeline(self, manager, options):
        return manager.run(self.stage)

    def handle(self, *args, **options):
        config = self.load_config(options)
        manager = PipelineManager(config, workers=options.get('workers'))
        try:
            result = self.execute_pipeline(manager, options)
        except MissingInputError as e:
            raise CommandError(str(e), returncode=EXIT_MISSING_INPUT)
        except (ValidationError, UnknownFormatError) as e:
            message = describe_validation(e) if isinstance(e, ValidationError) else str(e)
            raise CommandError(message, returncode=EXIT_CONFIG)
        except StageError as e:
            logger.exception(str(e))
            raise CommandError(str(e), returncode=EXIT_STAGE)
        self.report(manager, result)

    def report(self, manager, result):
        for path in sorted(result.get('outputs', {})):
            self.stdout.write(f'  {path}')
        self.stdout.write(self.style.SUCCESS(f'Etapa {self.stage} concluída em {manager.out}'))
