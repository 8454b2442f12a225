import dataclasses
from pathlib import Path

from django.core.management.base import CommandError

from ... import data, numkernel
from ...extractor import autoencoder_residual, intermediate_objective, train_extractor, train_intermediate
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Train an extractor and print its optimality certificate.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--party', choices=['tx', 'rx'], default='tx',
                            help='Which party to train when generating the world.')
        parser.add_argument('--features', help='Training features file (needs --prototypes).')
        parser.add_argument('--prototypes', help='Prototype file matching --features.')

    def run(self, **options):
        cfg = self.load_config(options)
        if options['features']:
            if not options['prototypes']:
                raise CommandError('--features needs --prototypes')
            train = data.load_features(options['features'], data.load_prototypes(options['prototypes']))
            lam = cfg.lambda_tx
        else:
            world = data.generate(dataclasses.replace(cfg.synth, seed=cfg.base_seed))
            train = world.tx_train if options['party'] == 'tx' else world.rx_train
            lam = cfg.lambda_tx if options['party'] == 'tx' else cfg.lambda_rx

        model = train_extractor(train, cfg.k, lam)
        inter = train_intermediate(train, cfg.k)
        h = numkernel.row_space_projection(train.visual)
        top = numkernel.eigh_sym(train.semantic @ h @ train.semantic.T).values[:cfg.k].sum()

        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f'model_{options["party"]}.npz'
        data.save_model(path, model)

        self.stdout.write(f'samples            {train.n}')
        self.stdout.write(f'k                  {cfg.k}')
        self.stdout.write(f'lambda             {lam!r}')
        self.stdout.write(f'objective          {intermediate_objective(inter.w_s, train.semantic, h)!r}')
        self.stdout.write(f'top-k eigen sum    {float(top)!r}')
        self.stdout.write(f'visual residual    {autoencoder_residual(model.p_v, train.visual, inter.f, lam):.3e}')
        self.stdout.write(f'semantic residual  {autoencoder_residual(model.p_s, train.semantic, inter.f, lam):.3e}')
        self.stdout.write(self.style.SUCCESS(f'model written to {path}'))
