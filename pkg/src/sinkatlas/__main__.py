"""Main entry point for the sinkatlas CLI."""

from sinkatlas.cli import main

if __name__ == "__main__":
    main()
