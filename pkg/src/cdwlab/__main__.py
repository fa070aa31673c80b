"""Entry point for cdwlab CLI."""

from .cli import run

if __name__ == "__main__":
    run()
