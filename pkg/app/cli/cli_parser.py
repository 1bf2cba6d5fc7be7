import argparse
from app.constants.app_constants import AppConstants
from app.constants.app_messages import AppMessages
from app.constants.exit_codes import ExitCodes
from app.enums.cli_command import CliCommand
from app.enums.precision import Precision
from app.enums.schedule_preset import SchedulePreset


class CliArgumentParser(argparse.ArgumentParser):
    """argparse with the usage exit code of this tool instead of 2."""

    def error(self, message):
        self.print_usage()
        self.exit(ExitCodes.USAGE, f"{self.prog}: error: {message}\n")


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="dotted-key config file (section.key=value lines)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key; repeatable")
    parser.add_argument("--out", help="also write the JSON report to this file")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog=AppConstants.PROJECT_NAME, description=AppMessages.CLI_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {AppConstants.VERSION}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    train = commands.add_parser(CliCommand.TRAIN.value, help=AppMessages.TRAIN_HELP)
    _add_config_options(train)
    train.add_argument("--preset", choices=[preset.value for preset in SchedulePreset])
    train.add_argument("--iterations", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--manifest", help="camera manifest with target images; default is the synthetic scene")
    train.add_argument("--ply", help="initial cloud (required with --manifest)")
    train.add_argument("--output", help="output folder")
    train.add_argument("--no-progress", action="store_true")

    render = commands.add_parser(CliCommand.RENDER.value, help=AppMessages.RENDER_HELP)
    _add_config_options(render)
    render.add_argument("--ply", required=True)
    render.add_argument("--manifest", required=True)
    render.add_argument("--output", help="folder for the PNG images")

    prune = commands.add_parser(CliCommand.PRUNE.value, help=AppMessages.PRUNE_HELP)
    _add_config_options(prune)
    prune.add_argument("--ply", required=True)
    prune.add_argument("--manifest", required=True)
    prune.add_argument("--iterations", type=int, default=5000)
    prune.add_argument("--output", required=True, help="pruned PLY path")
    prune.add_argument("--all-params", action="store_true",
                       help="fine-tune every Gaussian parameter, not only the mask logits")

    gradcheck = commands.add_parser(CliCommand.GRADCHECK.value, help=AppMessages.GRADCHECK_HELP)
    _add_config_options(gradcheck)
    gradcheck.add_argument("--seed", type=int)
    gradcheck.add_argument("--scenes", type=int)
    gradcheck.add_argument("--precision", choices=[precision.value for precision in Precision])

    bench = commands.add_parser(CliCommand.BENCH.value, help=AppMessages.BENCH_HELP)
    _add_config_options(bench)
    bench.add_argument("--gaussians", type=int)
    bench.add_argument("--width", type=int)
    bench.add_argument("--height", type=int)
    bench.add_argument("--repeats", type=int, default=5)

    stats = commands.add_parser(CliCommand.STATS.value, help=AppMessages.STATS_HELP)
    _add_config_options(stats)
    stats.add_argument("--gaps", default="-3,-1,0,1,3",
                       help="comma-separated logit gaps z_present - z_absent")
    stats.add_argument("--draws", type=int)
    stats.add_argument("--temperature", type=float)
    stats.add_argument("--seed", type=int)
    return parser
