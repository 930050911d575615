"""
Programmatic entry point for the Grid Lab commands.
``cli(["simulate", "ne_step_gather_broadcast", "--horizon", "5"])`` behaves like
``python manage.py simulate ...`` and returns the exit code instead of exiting.
"""

import os
import sys
from typing import Optional, Sequence

SUBCOMMANDS = ("simulate", "compare", "dispatch", "equilibrium", "validate")


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 0 on success, 1 on a domain error, 2 on a usage error."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        given = argv[0] if argv else "nothing"
        sys.stderr.write(f"usage: grid-lab {{{','.join(SUBCOMMANDS)}}} ...\nunknown subcommand: {given}\n")
        return 2

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    import django
    from django.core.management import load_command_class

    django.setup()
    command = load_command_class("apps.grid_lab", argv[0])
    try:
        command.run_from_argv(["grid-lab", *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(cli())
