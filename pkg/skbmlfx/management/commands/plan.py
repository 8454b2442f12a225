import dataclasses
from pathlib import Path

from ... import data, harness
from ...planner import PLANNER_NAMES, run_planner
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Solve one planning instance with a named planner and write the JSON report.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--instance', help='Instance file; when omitted, trial 0 of the configuration is used.')
        parser.add_argument('--planner', choices=PLANNER_NAMES, default='cccp')

    def run(self, **options):
        cfg = self.load_config(options)
        out_dir = Path(cfg.out_dir)
        if options['instance']:
            inst = data.load_instance(options['instance'])
        else:
            inst = harness.prepare_instance(cfg, harness.prepare_world(cfg, 0)).instance
            out_dir.mkdir(parents=True, exist_ok=True)
            data.save_instance(out_dir / 'instance.csv', inst)
            self.stdout.write(f'wrote {out_dir / "instance.csv"}')

        planner_options = dataclasses.replace(cfg.options, seed=cfg.base_seed)
        report = run_planner(options['planner'], inst, planner_options)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f'plan_{options["planner"]}.json'
        self.stdout.write(data.report_to_json(report, path))
        if not report.feasible:
            self.stderr.write(self.style.WARNING('the returned assignment exceeds the latency budget'))
