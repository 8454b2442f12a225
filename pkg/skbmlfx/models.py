import json

from django.db import models, transaction


class ExperimentRun(models.Model):
    KIND_CHOICES = [
        ('tradeoff', 'Latency/accuracy tradeoff'),
        ('sweep', 'Knowledge-base size sweep'),
    ]
    SIDE_CHOICES = [
        ('tx', 'Transmitter'),
        ('rx', 'Receiver'),
    ]

    kind = models.CharField(max_length=16, choices=KIND_CHOICES)
    side = models.CharField(max_length=2, choices=SIDE_CHOICES, blank=True, default='')
    base_seed = models.BigIntegerField()
    trials = models.PositiveIntegerField()
    config = models.TextField(help_text='Effective configuration as sorted JSON.')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    @classmethod
    def record(cls, kind, cfg, rows, side=''):
        """Store a finished experiment and all of its rows in one transaction."""
        with transaction.atomic():
            run = cls.objects.create(
                kind=kind,
                side=side or '',
                base_seed=cfg.base_seed,
                trials=cfg.trials,
                config=json.dumps(cfg.as_dict(), sort_keys=True),
            )
            ExperimentResult.objects.bulk_create([
                ExperimentResult(
                    run=run,
                    trial=row.trial,
                    planner=row.planner,
                    skb_size=row.skb_size,
                    avg_loss=row.avg_loss,
                    avg_latency_s=row.avg_latency_s,
                    accuracy=row.accuracy,
                    feasible=row.feasible,
                    wall_time_s=row.wall_time_s,
                )
                for row in rows
            ])
        return run

    def mean_accuracy(self, planner):
        results = self.results.filter(planner=planner)
        if results.exists():
            return results.aggregate(models.Avg('accuracy'))['accuracy__avg']
        return None

    def __str__(self):
        label = f'{self.kind} ({self.side})' if self.side else self.kind
        return f'{label} seed={self.base_seed} trials={self.trials}'


class ExperimentResult(models.Model):
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='results')
    trial = models.PositiveIntegerField()
    planner = models.CharField(max_length=32)
    skb_size = models.PositiveIntegerField(null=True, blank=True)
    avg_loss = models.FloatField()
    avg_latency_s = models.FloatField()
    accuracy = models.FloatField()
    feasible = models.BooleanField()
    wall_time_s = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['trial', 'skb_size', 'planner']

    def __str__(self):
        return f'trial {self.trial} {self.planner}: accuracy {self.accuracy:.3f}'
