"""Main module."""
import sys

from painleve_gap.cli import main

if __name__ == "__main__":
    sys.exit(main())
