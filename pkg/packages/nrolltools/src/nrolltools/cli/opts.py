import click

from nrolltools import get_nrolltools_version_str
from nrolltools.constants import PROGRAM_NAME

###############################################################################
#
# common flags: --verbose/-v, --quiet/-q
#
###############################################################################
def verbosity_opts():
    def cap3(ctx: click.Context, _param: click.Parameter, value: int) -> int:
        return min(value, 3)

    verbose_option = click.option(
        "--verbose", "-v",
        "verbosity",
        count=True,
        help="Log to stderr: -v warnings, -vv info, -vvv debug. run.log always gets everything.",
        callback=cap3,
    )
    quiet_option = click.option(
        "--quiet", "-q",
        is_flag=True,
        default=False,
        help="Suppress console output (overrides -v); the exit code still reports failure.",
    )
    opts = [verbose_option, quiet_option]

    # Apply in reverse so the first listed ends up nearest the function
    def _wrap(f):
        for opt in reversed(opts):
            f = opt(f)
        return f
    return _wrap


def version_opt():
    return click.version_option(
        version=get_nrolltools_version_str(),
        prog_name=PROGRAM_NAME,
        message="%(prog)s %(version)s",
    )


###############################################################################
#
# experiment arguments: [CONFIG] --set key.path=value ...
#
###############################################################################
def experiment_opts():
    config_argument = click.argument(
        "config_path",
        metavar="[CONFIG]",
        required=False,
        type=click.Path(exists=True, dir_okay=False, readable=True),
    )
    set_option = click.option(
        "--set", "-s",
        "overrides",
        multiple=True,
        metavar="KEY.PATH=VALUE",
        help="Override one config value (parsed as JSON, else taken as a string). Repeatable.",
    )
    opts = [config_argument, set_option]

    def _wrap(f):
        for opt in reversed(opts):
            f = opt(f)
        return f
    return _wrap
