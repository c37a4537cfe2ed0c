import asyncio
import sys

from certifier import CertifierConfig
from initialize import initialize
from python.helpers import runtime
from python.helpers.dotenv import load_dotenv
from python.helpers.errors import CertifierError, error_text, format_error, handle_error
from python.helpers.extract_tools import get_tool
from python.helpers.print_style import PrintStyle


async def run_command(config: CertifierConfig, args: dict) -> int:
    tool = get_tool(config, args["command"], args)
    await tool.before_execution()
    try:
        response = await tool.execute()
    except CertifierError as e:
        PrintStyle.error(error_text(e))
        return 1
    except Exception as e:
        handle_error(e)
        PrintStyle.error(format_error(e))
        return 1
    await tool.after_execution(response)
    return response.exit_code


def run(argv: list[str] | None = None) -> int:
    PrintStyle.standard("Initializing certifier...")

    # load env vars
    load_dotenv()

    # parse arguments and build the config
    runtime.initialize(argv)
    config = initialize()

    return asyncio.run(run_command(config, runtime.args))


if __name__ == "__main__":
    sys.exit(run())
