import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('tradeoff', 'Latency/accuracy tradeoff'), ('sweep', 'Knowledge-base size sweep')], max_length=16)),
                ('side', models.CharField(blank=True, choices=[('tx', 'Transmitter'), ('rx', 'Receiver')], default='', max_length=2)),
                ('base_seed', models.BigIntegerField()),
                ('trials', models.PositiveIntegerField()),
                ('config', models.TextField(help_text='Effective configuration as sorted JSON.')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('trial', models.PositiveIntegerField()),
                ('planner', models.CharField(max_length=32)),
                ('skb_size', models.PositiveIntegerField(blank=True, null=True)),
                ('avg_loss', models.FloatField()),
                ('avg_latency_s', models.FloatField()),
                ('accuracy', models.FloatField()),
                ('feasible', models.BooleanField()),
                ('wall_time_s', models.FloatField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='skbmlfx.experimentrun')),
            ],
            options={
                'ordering': ['trial', 'skb_size', 'planner'],
            },
        ),
    ]
