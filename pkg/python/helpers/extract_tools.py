import importlib
import inspect
import os
from typing import Type, TypeVar

from .files import get_abs_path

T = TypeVar("T")

TOOLS_PACKAGE = "python.tools"


def find_class(module_name: str, base_class: Type[T]) -> Type[T] | None:
    """The subclass of `base_class` defined in `module_name` itself, if any."""
    module = importlib.import_module(module_name)
    for _, cls in inspect.getmembers(module, inspect.isclass):
        if cls is not base_class and issubclass(cls, base_class) and cls.__module__ == module.__name__:
            return cls
    return None


def get_tool(config, name: str, args: dict):
    from python.helpers.tool import Tool
    from python.tools.unknown import Unknown

    tool_class = None
    source = get_abs_path(*TOOLS_PACKAGE.split("."), name + ".py")
    if name.isidentifier() and os.path.isfile(source):
        tool_class = find_class(f"{TOOLS_PACKAGE}.{name}", Tool)
    return (tool_class or Unknown)(config=config, name=name, args=args)
