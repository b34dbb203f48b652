"""Expression syntax, action files and the command-line interface."""


def main(argv=None) -> int:
    from .main import main as _main

    return _main(argv)


__all__ = ["main"]
