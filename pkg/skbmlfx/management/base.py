from django.core.management.base import BaseCommand, CommandError

from .. import config
from ..exceptions import SkbmlfxError


class ExperimentCommand(BaseCommand):
    """Base for the experiment commands: shared options, errors as ``CommandError``."""

    requires_system_checks = []
    record_option = False

    def add_arguments(self, parser):
        parser.add_argument('--config', default=config.DEFAULT,
                            help='Configuration file, or "default" for the built-in settings.')
        parser.add_argument('--seed', type=int, help='Override experiment.base_seed.')
        parser.add_argument('--out', help='Override experiment.out_dir.')
        parser.add_argument('--workers', type=int, help='Override experiment.workers.')
        if self.record_option:
            parser.add_argument('--record', action='store_true',
                                help='Also store the results in the experiment database.')

    def load_config(self, options):
        return config.load(options['config']).with_overrides(
            seed=options.get('seed'), out_dir=options.get('out'), workers=options.get('workers'),
        )

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except SkbmlfxError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}') from exc

    def run(self, **options):
        raise NotImplementedError
