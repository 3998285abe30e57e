# Command package initialization
import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

from app.models import RunConfig

Handler = Callable[[RunConfig, argparse.Namespace], int]
Argument = Tuple[Tuple[str, ...], Dict[str, Any]]


def arg(*flags: str, **kwargs: Any) -> Argument:
    return flags, kwargs


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    arguments: List[Argument] = field(default_factory=list)


class CommandGroup:
    """Collects subcommand handlers; main includes each group into the parser tree"""

    def __init__(self):
        self.commands: List[Command] = []

    def command(self, name: str, help: str, arguments: Sequence[Argument] = ()):
        def decorator(handler: Handler) -> Handler:
            self.commands.append(Command(name, help, handler, list(arguments)))
            return handler
        return decorator

    def include(self, subparsers, parents: Sequence[argparse.ArgumentParser]):
        for command in self.commands:
            parser = subparsers.add_parser(command.name, help=command.help, parents=list(parents))
            for flags, kwargs in command.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=command.handler, command=command.name)
