"""
Configurações do projeto ontologia.

Pipeline em lote que extrai uma hierarquia inicial de classes de um dump de
dados abertos ligados (LOD). Não há servidor web: os subcomandos são comandos
de gerenciamento do Django (``python manage.py ingest``, ``link``, ...).

Os padrões do pipeline ficam em ``ONTOLOGIA_PIPELINE``; um arquivo INI passado
com ``--config`` sobrescreve qualquer chave, seção por seção.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('ONTOLOGIA_SECRET_KEY', 'ontologia-batch-sem-sessoes')

DEBUG = bool(os.environ.get('ONTOLOGIA_DEBUG'))

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'conceitos',
]

MIDDLEWARE = []


# Database
# Guarda apenas o histórico de execuções (Execucao / RegistroEtapa).

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('ONTOLOGIA_DB', BASE_DIR / 'db.sqlite3'),
    }
}


# Internationalization

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'America/Sao_Paulo'

USE_I18N = True

USE_TZ = True


# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Prefixos usados para escrever IRIs compactas no INI e no SPARQL emitido
ONTOLOGIA_PREFIXOS = {
    'wd': 'http://www.wikidata.org/entity/',
    'wdt': 'http://www.wikidata.org/prop/direct/',
    'rdfs': 'http://www.w3.org/2000/01/rdf-schema#',
    'skos': 'http://www.w3.org/2004/02/skos/core#',
    'rdf': 'http://www.w3.org/1999/02/22-rdf-syntax-ns#',
}

# Padrões do pipeline (modelo de dados do Wikidata, rótulos em japonês)
ONTOLOGIA_PIPELINE = {
    'paths': {
        'dump': '',
        'snapshot': '',
        'terms': '',
        'ground_truth': '',
        'output_dir': 'saida',
    },
    'ingest': {
        'subclass_predicates': ['wdt:P279'],
        'instance_predicates': ['wdt:P31'],
        'representative_label_predicates': ['rdfs:label'],
        'alias_label_predicates': ['skos:altLabel'],
        'languages': ['ja'],
        'extra_predicates': ['wdt:P131', 'wdt:P21'],
        'case_fold': False,
        'strict_snapshot': True,
    },
    'exclusion': {
        # humano, prenome feminino, termo musical, filme
        'adjacent_blacklist': ['wd:Q5', 'wd:Q11879590', 'wd:Q20202269', 'wd:Q11424'],
        'adjacency_predicates': ['wdt:P31'],
        # divisão administrativa, gênero
        'property_blacklist': ['wdt:P131', 'wdt:P21'],
    },
    'analysis': {
        'cu_threshold': 2,
        'common_path_threshold': 2,
        'max_depth': 30,
        'max_nes': 0,
    },
    'run': {
        'trim': True,
        'cutoffs': [1, 2, 3, 4, 5, 6, 7],
        'workers': 1,
        'emit_sparql': True,
    },
    'sparql': {
        'prefixes': ONTOLOGIA_PREFIXOS,
    },
}

# Configurações de Log
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'conceitos': {
            'handlers': ['console'],
            'level': 'DEBUG' if DEBUG else 'INFO',
            'propagate': False,
        },
    },
}
