import argparse
from typing import Any

from python.helpers import dotenv, settings

parser = argparse.ArgumentParser(
    prog="certifier",
    description="Certify Greenberg's conjecture for p via Bernoulli, Vandiver and Iwasawa-series checks.",
)
args: dict[str, Any] = {}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", type=int, default=None, help="Galois level n")
    common.add_argument("--prec", dest="precision", type=int, default=None, help="p-adic precision N")
    common.add_argument("--deg", dest="degree_cap", type=int, default=None, help="total-degree cap D")
    common.add_argument("--witnesses", type=int, default=None, help="Vandiver witness budget W")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"], default=None)
    common.add_argument("--cache-dir", dest="cache_dir", type=str, default=None)
    common.add_argument("--jobs", type=int, default=None, help="worker processes")
    common.add_argument("--no-cache", dest="no_cache", action="store_true")

    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="verdict for one prime")
    check.add_argument("p", type=int)

    scan = commands.add_parser("scan", parents=[common], help="verdicts for all odd primes up to p_max")
    scan.add_argument("p_max", type=int)

    koszul = commands.add_parser("koszul", parents=[common], help="Koszul cohomology of a module presentation")
    koszul.add_argument("input_file", type=str)
    koszul.add_argument("--max-level", dest="max_level", type=int, default=None)
    koszul.add_argument("--flavor", choices=["omega", "nu"], default="omega")

    cache = commands.add_parser("cache", parents=[common], help="certificate cache maintenance")
    cache.add_argument("cache_command", choices=["list", "verify", "clear"])
    cache.add_argument("--fraction", type=float, default=None, help="sample fraction for verify")
    cache.add_argument("--seed", type=int, default=0)


_build_parser()


def initialize(argv: list[str] | None = None):
    global args
    if args and argv is None:
        return
    known = parser.parse_args(argv)
    args = {key: value for key, value in vars(known).items() if value is not None}


def get_arg(name: str):
    return args.get(name, None)


def has_arg(name: str):
    return name in args


def get_jobs() -> int:
    jobs = (
        get_arg("jobs")
        or int(dotenv.get_dotenv_value(dotenv.KEY_JOBS, 0))
        or settings.get_settings()["jobs"]
    )
    return max(1, jobs)


def get_cache_dir() -> str:
    return (
        get_arg("cache_dir")
        or dotenv.get_dotenv_value(dotenv.KEY_CACHE_DIR, "")
        or settings.get_settings()["cache_dir"]
    )
