"""Module entry point: python -m hoci."""
import sys

from .cli import main

sys.exit(main())
