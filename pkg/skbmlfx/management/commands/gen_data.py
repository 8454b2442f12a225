import dataclasses
from pathlib import Path

from ... import data
from ...extractor import TrainingSet
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Generate a synthetic zero-shot world and write its feature and prototype files.'

    def run(self, **options):
        cfg = self.load_config(options)
        world = data.generate(dataclasses.replace(cfg.synth, seed=cfg.base_seed))
        out_dir = Path(cfg.out_dir)

        test = TrainingSet.from_labels(world.test_visual, world.test_labels, world.prototypes)
        files = {
            'prototypes.csv': lambda path: data.save_prototypes(path, world.prototypes),
            'tx_train.csv': lambda path: data.save_features(path, world.tx_train),
            'rx_train.csv': lambda path: data.save_features(path, world.rx_train),
            'test.csv': lambda path: data.save_features(path, test),
        }
        for name, save in files.items():
            save(out_dir / name)
            self.stdout.write(f'wrote {out_dir / name}')

        manifest = {
            'synth': world.config.as_dict(),
            'seen_classes': list(world.seen_classes),
            'unseen_classes': list(world.unseen_classes),
            'tx_classes': sorted(set(world.tx_train.labels.tolist())),
            'rx_classes': sorted(set(world.rx_train.labels.tolist())),
        }
        data.write_json(out_dir / 'world.json', manifest)
        self.stdout.write(self.style.SUCCESS(f'world seed={cfg.base_seed} written to {out_dir}'))
