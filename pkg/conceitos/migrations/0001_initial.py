# Generated by Django 4.2.7 on 2026-10-19 10:12

from django.db import migrations, models
import django.db.models.deletion
import django.utils.timezone


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Execucao',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('comando', models.CharField(max_length=30, verbose_name='Comando')),
                ('fingerprint', models.CharField(max_length=64, verbose_name='Impressão Digital da Configuração')),
                ('arquivo_config', models.CharField(blank=True, max_length=500, verbose_name='Arquivo de Configuração')),
                ('diretorio_saida', models.CharField(max_length=500, verbose_name='Diretório de Saída')),
                ('workers', models.PositiveIntegerField(default=1, verbose_name='Workers')),
                ('status', models.CharField(choices=[('em_andamento', 'Em andamento'), ('concluida', 'Concluída'), ('falhou', 'Falhou')], default='em_andamento', max_length=20, verbose_name='Status')),
                ('iniciada_em', models.DateTimeField(default=django.utils.timezone.now, verbose_name='Início')),
                ('finalizada_em', models.DateTimeField(blank=True, null=True, verbose_name='Fim')),
            ],
            options={
                'verbose_name': 'Execução',
                'verbose_name_plural': 'Execuções',
                'ordering': ['-iniciada_em'],
                'indexes': [models.Index(fields=['-iniciada_em'], name='conceitos_e_iniciad_3f1c2a_idx'), models.Index(fields=['fingerprint', 'status'], name='conceitos_e_fingerp_8d4e7b_idx')],
            },
        ),
        migrations.CreateModel(
            name='RegistroEtapa',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('etapa', models.CharField(choices=[('ingest', 'Ingestão'), ('link', 'Ligação de termos'), ('upper', 'Grafo superior'), ('ecu', 'Análise ECU'), ('harvest', 'Coleta'), ('trim', 'Poda'), ('eval', 'Avaliação')], max_length=10, verbose_name='Etapa')),
                ('sucesso', models.BooleanField(default=False, verbose_name='Sucesso')),
                ('duracao', models.FloatField(default=0, verbose_name='Duração (s)')),
                ('avisos', models.TextField(blank=True, verbose_name='Avisos')),
                ('erro', models.TextField(blank=True, verbose_name='Erro')),
                ('saidas', models.JSONField(blank=True, default=dict, help_text='Caminho relativo → SHA-256', verbose_name='Saídas')),
                ('data_hora', models.DateTimeField(default=django.utils.timezone.now, verbose_name='Data e Hora')),
                ('execucao', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='etapas', to='conceitos.execucao', verbose_name='Execução')),
            ],
            options={
                'verbose_name': 'Registro de Etapa',
                'verbose_name_plural': 'Registros de Etapa',
                'ordering': ['data_hora', 'id'],
                'indexes': [models.Index(fields=['execucao', 'etapa'], name='conceitos_r_execuca_5b9e0d_idx')],
            },
        ),
    ]
