import logging
import os
import tempfile
from pathlib import Path

from dotenv import find_dotenv, load_dotenv
from rich.logging import RichHandler

load_dotenv(find_dotenv())


OUTPUT_PATH = Path(os.getenv("RULE184_OUTPUT", "runs"))
DEFAULT_THREADS = int(os.getenv("RULE184_THREADS", "1"))
DEFAULT_SEED = int(os.getenv("RULE184_SEED", "184"))
LOG_LEVEL = os.getenv("RULE184_LOG_LEVEL", "WARNING")

MANIFEST_FILE = "manifest.yaml"


def configure_logging(level: str | int = LOG_LEVEL) -> None:
    """Route the library's loggers through a `rich` handler. Only the CLI calls
    this; as a library, `rule184` leaves handlers to the host application."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


def atomic_write(target: Path, text: str) -> Path:
    """Write `text` to a sibling temporary file, then rename it over `target`
    so readers never observe a partial file."""
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def chunked(total: int, size: int):
    """Split `total` items into consecutive `(start, count)` chunks of at most `size`.

    Examples:
        >>> list(chunked(10, 4))
        [(0, 4), (4, 4), (8, 2)]
    """
    start = 0
    while start < total:
        count = min(size, total - start)
        yield start, count
        start += count
