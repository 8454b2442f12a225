"""Command-line surface shared by ``python -m skbmlfx`` and ``manage.py``.

Exit codes: 0 success, 1 usage error (synopsis on stderr), 2 runtime error.
"""
import os
import sys

SUBCOMMANDS = {
    'gen-data': 'gen_data',
    'train': 'train',
    'plan': 'plan',
    'tradeoff': 'tradeoff',
    'sweep': 'sweep',
    'oracle': 'oracle',
    'selftest': 'selftest',
}

SYNOPSIS = (
    'usage: skbmlfx {' + ','.join(SUBCOMMANDS) + '} [--config PATH|default] [--seed N] [--out DIR] ...\n'
    '       skbmlfx <subcommand> --help for the options of one subcommand\n'
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _setup():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    import django

    django.setup()


def main(argv=None, stdout=None, stderr=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if argv and argv[0] in ('-h', '--help'):
        stdout.write(SYNOPSIS)
        return EXIT_OK
    if not argv or argv[0] not in SUBCOMMANDS:
        if argv:
            stderr.write(f'error: unknown subcommand {argv[0]!r}\n')
        stderr.write(SYNOPSIS)
        return EXIT_USAGE

    _setup()
    from django.core.management import load_command_class
    from django.core.management.base import CommandError

    from .exceptions import SkbmlfxError

    name = argv[0]
    command = load_command_class('skbmlfx', SUBCOMMANDS[name])
    parser = command.create_parser('skbmlfx', name)
    try:
        options = parser.parse_args(argv[1:])
    except CommandError as exc:
        stderr.write(f'{exc}\n')
        stderr.write(parser.format_usage())
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits through argparse
        return EXIT_OK if not exc.code else EXIT_USAGE

    cmd_options = vars(options)
    args = cmd_options.pop('args', ())
    cmd_options['stdout'] = stdout
    cmd_options['stderr'] = stderr
    try:
        command.execute(*args, **cmd_options)
    except (CommandError, SkbmlfxError) as exc:
        stderr.write(f'error: {exc}\n')
        return EXIT_RUNTIME
    return EXIT_OK
