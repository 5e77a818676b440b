"""Entry point for running as a module: python -m spinstat"""

import sys


def main() -> int:
    """Main entry point."""
    # Configure logging first
    from .config import get_settings
    from .core.logging_config import setup_logging

    settings = get_settings()
    setup_logging(settings.log_level, settings.log_file)

    from .cli import run

    return run()


if __name__ == "__main__":
    sys.exit(main())
