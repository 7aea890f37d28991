import os
from dotenv import load_dotenv

load_dotenv()

class Settings:
    api_title: str = "Free Field Invariants API"
    api_version: str = "1.0.0"

    # Reports
    output_dir: str = os.getenv("FREEFIELD_OUTPUT_DIR", "reports")

    # Runs
    default_seed: int = int(os.getenv("FREEFIELD_SEED", "20240601"))
    default_threads: int = int(os.getenv("FREEFIELD_THREADS", "1"))
    conjecture_kmax: int = int(os.getenv("FREEFIELD_CONJECTURE_KMAX", "2"))

    # Limits on what one request may ask for
    max_n: int = int(os.getenv("FREEFIELD_MAX_N", "6"))
    max_kmax: int = int(os.getenv("FREEFIELD_MAX_KMAX", "6"))

    # Memoization
    cache_size: int = int(os.getenv("FREEFIELD_CACHE_SIZE", "8192"))
    field_memo_limit: int = int(os.getenv("FREEFIELD_FIELD_MEMO_LIMIT", "50000"))

    log_level: str = os.getenv("FREEFIELD_LOG_LEVEL", "WARNING")

    # HTTP
    cors_origins: list = [
        origin.strip()
        for origin in os.getenv("FREEFIELD_CORS_ORIGINS", "http://localhost:3000").split(",")
        if origin.strip()
    ]

settings = Settings()
