#!/usr/bin/env python
"""Utilitário de linha de comando do pipeline de extração de ontologias.

Exemplos:
    python manage.py migrate
    python manage.py run_all --config pipeline.ini --workers 4
"""
import os
import sys


def main():
    """Executa os subcomandos do pipeline."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ontologia.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Não foi possível importar o Django. Ele está instalado e "
            "disponível no PYTHONPATH? O ambiente virtual foi ativado?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
