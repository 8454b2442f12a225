#!/usr/bin/env python
"""Entry point for the experiment commands and Django administration.

The experiment subcommands (``gen-data``, ``train``, ``plan``, ``tradeoff``,
``sweep``, ``oracle``, ``selftest``) go through ``skbmlfx.cli`` so that they
share its exit-code contract; everything else is handed to Django.
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    from skbmlfx.cli import SUBCOMMANDS, main as cli_main

    if len(sys.argv) > 1 and sys.argv[1] in SUBCOMMANDS:
        sys.exit(cli_main(sys.argv[1:]))
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
