"""
mlaudit command line
Root group: global flags, logging and error-to-exit-code mapping
"""

import logging
import sys

import click

from src import __version__
from src.commands.case import case_group
from src.commands.catalog import catalog_group
from src.commands.check import check_group
from src.commands.data import data_group
from src.commands.diagnose import diagnose_group
from src.commands.metrics import metrics_group
from src.commands.report import report_group
from src.config import load_settings
from src.errors import AuditError, ExitCode

logger = logging.getLogger(__name__)


class AuditGroup(click.Group):
    """Root group that turns audit errors into exit code 3 instead of tracebacks"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except AuditError as e:
            click.echo(f"error: {e.message}", err=True)
            raise click.exceptions.Exit(int(e.exit_code))
        except Exception as e:
            logger.exception(f"Unexpected failure: {e}")
            click.echo(f"error: {e}", err=True)
            raise click.exceptions.Exit(int(ExitCode.INPUT))


def configure_logging(verbose: bool, debug: bool) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@click.group(cls=AuditGroup)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='JSON file overriding the default thresholds')
@click.option('--verbose', is_flag=True, help='Log check progress to stderr')
@click.option('--debug', is_flag=True, help='Log everything to stderr')
@click.version_option(__version__, prog_name='mlaudit')
@click.pass_context
def cli(ctx, config_path, verbose, debug):
    """Audit datasets, models and certification cases for ML certification."""
    configure_logging(verbose, debug)
    ctx.ensure_object(dict)
    ctx.obj['settings'] = load_settings(config_path)
    logger.debug(f"Settings: {ctx.obj['settings'].to_dict()}")


# Register command groups
cli.add_command(data_group)
cli.add_command(metrics_group)
cli.add_command(check_group)
cli.add_command(diagnose_group)
cli.add_command(catalog_group)
cli.add_command(case_group)
cli.add_command(report_group)


def cli_main(argv=None) -> int:
    """Run the CLI and return its exit code; nothing escapes as an exception"""
    try:
        code = cli.main(args=argv, prog_name='mlaudit', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return int(ExitCode.USAGE)
    except click.Abort:
        click.echo('Aborted!', err=True)
        return int(ExitCode.USAGE)
    return code if isinstance(code, int) else int(ExitCode.PASS)


if __name__ == '__main__':
    sys.exit(cli_main())
