import logging
from pathlib import Path
from typing import Optional
from app.config import settings

logger = logging.getLogger(__name__)

class Archive:
    directory: Optional[Path] = None

archive = Archive()

def get_archive() -> Path:
    if archive.directory is None:
        # Fallback: open on demand
        open_archive()
        logger.info("✅ Report archive opened (fallback in get_archive)")
    return archive.directory

def open_archive(directory: Optional[str] = None) -> Path:
    """Create the output directory reports are written to"""
    archive.directory = Path(directory or settings.output_dir)
    archive.directory.mkdir(parents=True, exist_ok=True)
    logger.info("✅ Report archive ready at %s", archive.directory)
    return archive.directory

def close_archive():
    """Forget the output directory"""
    archive.directory = None
    logger.info("❌ Report archive closed")

def write_report(name: str, extension: str, text: str) -> Path:
    """Write <name>.<extension> into the archive; returns the path"""
    path = get_archive() / f"{name}.{extension}"
    path.write_text(text, encoding="utf-8")
    logger.info("✅ Archived %s", path)
    return path
