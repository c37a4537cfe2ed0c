import atexit
import html
import os
import sys
from datetime import datetime
from functools import lru_cache

import webcolors

from . import dotenv, files


@lru_cache(maxsize=None)
def _rgb(color: str) -> tuple[int, int, int] | None:
    if color == "default":
        return None
    try:
        if color.startswith("#"):
            rgb = webcolors.hex_to_rgb(color)
        else:
            rgb = webcolors.name_to_rgb(color)
    except ValueError:
        return None
    return rgb.red, rgb.green, rgb.blue


class _HtmlLog:
    """Run log under logs/, one file per process, closed at exit."""

    path: str | None = None

    @classmethod
    def open(cls):
        if cls.path is not None:
            return
        logs_dir = files.get_abs_path("logs")
        os.makedirs(logs_dir, exist_ok=True)
        name = datetime.now().strftime("certifier_%Y%m%d_%H%M%S.html")
        cls.path = os.path.join(logs_dir, name)
        cls.write("<html><body style='background-color:black;font-family: monospace;'><pre>\n")
        atexit.register(cls.write, "</pre></body></html>")

    @classmethod
    def write(cls, fragment: str):
        if cls.path:
            with open(cls.path, "a", encoding="utf-8") as f:
                f.write(fragment)


class PrintStyle:
    """Styled diagnostics on stderr, mirrored into an HTML run log.

    stdout is reserved for reports (JSON / CSV), so nothing here writes to it.
    """

    last_endline = True
    html_enabled: bool | None = None

    def __init__(self, bold=False, font_color="default", background_color="default", padding=False):
        self.bold = bold
        self.font_color = font_color
        self.background_color = background_color
        self.padding = padding

        if PrintStyle.html_enabled is None:
            flag = str(dotenv.get_dotenv_value(dotenv.KEY_HTML_LOG, "true"))
            PrintStyle.html_enabled = flag.lower().strip() != "false"
        if PrintStyle.html_enabled:
            _HtmlLog.open()

    def _ansi(self, text: str) -> str:
        if not sys.stderr.isatty():
            return text
        codes = ["1"] if self.bold else []
        fg, bg = _rgb(self.font_color), _rgb(self.background_color)
        if fg:
            codes.append("38;2;%d;%d;%d" % fg)
        if bg:
            codes.append("48;2;%d;%d;%d" % bg)
        if not codes:
            return text
        return f"\033[{';'.join(codes)}m{text}\033[0m"

    def _html(self, text: str) -> str:
        styles = ["font-weight: bold;"] if self.bold else []
        fg, bg = _rgb(self.font_color), _rgb(self.background_color)
        if fg:
            styles.append("color: rgb(%d, %d, %d);" % fg)
        if bg:
            styles.append("background-color: rgb(%d, %d, %d);" % bg)
        escaped = html.escape(text).replace("\n", "<br>")
        return f'<span style="{" ".join(styles)}">{escaped}</span>'

    def _write(self, text: str, end: str):
        if self.padding:
            print(file=sys.stderr)
            self._log("<br>")
        print(self._ansi(text), end=end, file=sys.stderr, flush=True)
        self._log(self._html(text) + ("<br>\n" if end else ""))

    def _log(self, fragment: str):
        if PrintStyle.html_enabled:
            _HtmlLog.write(fragment)

    def print(self, *args, sep=" "):
        if not PrintStyle.last_endline:
            print(file=sys.stderr)
            self._log("<br>")
        self._write(sep.join(map(str, args)), "\n")
        PrintStyle.last_endline = True

    def stream(self, *args, sep=" "):
        self._write(sep.join(map(str, args)), "")
        self.padding = False
        PrintStyle.last_endline = False

    @staticmethod
    def _level(color: str, label: str, text: str):
        PrintStyle(font_color=color, padding=True).print(f"{label}: {text}")

    @staticmethod
    def standard(text: str):
        PrintStyle().print(text)

    @staticmethod
    def hint(text: str):
        PrintStyle._level("#6C3483", "Hint", text)

    @staticmethod
    def info(text: str):
        PrintStyle._level("#0000FF", "Info", text)

    @staticmethod
    def success(text: str):
        PrintStyle._level("#008000", "Success", text)

    @staticmethod
    def warning(text: str):
        PrintStyle._level("#FFA500", "Warning", text)

    @staticmethod
    def debug(text: str):
        PrintStyle._level("#808080", "Debug", text)

    @staticmethod
    def error(text: str):
        PrintStyle._level("red", "Error", text)
