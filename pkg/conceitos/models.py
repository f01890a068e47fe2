from django.db import models
from django.utils import timezone


class Execucao(models.Model):
    """Uma invocação de subcomando do pipeline (ou de run_all)."""

    STATUS_CHOICES = [
        ('em_andamento', 'Em andamento'),
        ('concluida', 'Concluída'),
        ('falhou', 'Falhou'),
    ]

    comando = models.CharField(max_length=30, verbose_name='Comando')
    fingerprint = models.CharField(
        max_length=64,
        verbose_name='Impressão Digital da Configuração'
    )
    arquivo_config = models.CharField(
        max_length=500,
        blank=True,
        verbose_name='Arquivo de Configuração'
    )
    diretorio_saida = models.CharField(max_length=500, verbose_name='Diretório de Saída')
    workers = models.PositiveIntegerField(default=1, verbose_name='Workers')
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default='em_andamento',
        verbose_name='Status'
    )
    iniciada_em = models.DateTimeField(default=timezone.now, verbose_name='Início')
    finalizada_em = models.DateTimeField(null=True, blank=True, verbose_name='Fim')

    class Meta:
        verbose_name = 'Execução'
        verbose_name_plural = 'Execuções'
        ordering = ['-iniciada_em']
        indexes = [
            models.Index(fields=['-iniciada_em'], name='conceitos_e_iniciad_3f1c2a_idx'),
            models.Index(fields=['fingerprint', 'status'], name='conceitos_e_fingerp_8d4e7b_idx'),
        ]

    def __str__(self):
        return f"{self.comando} - {self.get_status_display()} - {self.iniciada_em}"

    def finalizar(self, sucesso):
        self.status = 'concluida' if sucesso else 'falhou'
        self.finalizada_em = timezone.now()
        self.save(update_fields=['status', 'finalizada_em'])

    @property
    def duracao(self):
        if not self.finalizada_em:
            return None
        return (self.finalizada_em - self.iniciada_em).total_seconds()


class RegistroEtapa(models.Model):
    """Execução de uma etapa: duração, avisos e checksums das saídas."""

    ETAPA_CHOICES = [
        ('ingest', 'Ingestão'),
        ('link', 'Ligação de termos'),
        ('upper', 'Grafo superior'),
        ('ecu', 'Análise ECU'),
        ('harvest', 'Coleta'),
        ('trim', 'Poda'),
        ('eval', 'Avaliação'),
    ]

    execucao = models.ForeignKey(
        Execucao,
        on_delete=models.CASCADE,
        related_name='etapas',
        verbose_name='Execução'
    )
    etapa = models.CharField(max_length=10, choices=ETAPA_CHOICES, verbose_name='Etapa')
    sucesso = models.BooleanField(default=False, verbose_name='Sucesso')
    duracao = models.FloatField(
        default=0,
        verbose_name='Duração (s)'
    )
    avisos = models.TextField(blank=True, verbose_name='Avisos')
    erro = models.TextField(blank=True, verbose_name='Erro')
    saidas = models.JSONField(
        default=dict,
        blank=True,
        verbose_name='Saídas',
        help_text='Caminho relativo → SHA-256'
    )
    data_hora = models.DateTimeField(default=timezone.now, verbose_name='Data e Hora')

    class Meta:
        verbose_name = 'Registro de Etapa'
        verbose_name_plural = 'Registros de Etapa'
        ordering = ['data_hora', 'id']
        indexes = [
            models.Index(fields=['execucao', 'etapa'], name='conceitos_r_execuca_5b9e0d_idx'),
        ]

    def __str__(self):
        situacao = 'ok' if self.sucesso else 'falhou'
        return f"{self.get_etapa_display()} ({situacao}, {self.duracao:.1f}s)"
