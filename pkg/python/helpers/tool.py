import sys
from abc import abstractmethod
from dataclasses import dataclass
from typing import Any

from certifier import CertifierConfig
from python.helpers.print_style import PrintStyle


@dataclass
class Response:
    message: str
    exit_code: int = 0


class Tool:

    def __init__(self, config: CertifierConfig, name: str, args: dict[str, Any], **kwargs) -> None:
        self.config = config
        self.name = name
        self.args = args

    @abstractmethod
    async def execute(self, **kwargs) -> Response:
        pass

    async def before_execution(self, **kwargs):
        PrintStyle(font_color="#1B4F72", padding=True, background_color="white", bold=True).print(f"certifier: running '{self.name}'")
        shown = {key: value for key, value in self.args.items() if key != "command"}
        for key, value in shown.items():
            PrintStyle(font_color="#85C1E9", bold=True).stream(self.nice_key(key) + ": ")
            PrintStyle(font_color="#85C1E9").stream(str(value))
            PrintStyle().print()

    async def after_execution(self, response: Response, **kwargs):
        # the report is the only thing written to stdout
        if response.message:
            sys.stdout.write(response.message.rstrip("\n") + "\n")
            sys.stdout.flush()
        if response.exit_code:
            PrintStyle(font_color="red", padding=True).print(f"'{self.name}' finished with exit code {response.exit_code}")
        else:
            PrintStyle(font_color="#1B4F72", bold=True).print(f"'{self.name}' done")

    def nice_key(self, key: str):
        words = key.split("_")
        words = [words[0].capitalize()] + [word.lower() for word in words[1:]]
        return " ".join(words)
