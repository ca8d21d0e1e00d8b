"""Configuration and optional result cache for the patrol toolkit."""

import hashlib
import json
import os
from pathlib import Path

import redis
from dotenv import load_dotenv

from .logging_config import get_logger

logger = get_logger(__name__)

# Load environment variables from .env file
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


DEFAULT_THREADS = max(1, _int_from_env("PATROL_THREADS", os.cpu_count() or 1))
DEFAULT_SEED = _int_from_env("PATROL_SEED", 0)

# Redis is optional: reports are only cached when a URL is configured
REDIS_URL = os.environ.get("PATROL_REDIS_URL")

# Row-sum tolerance accepted when ingesting chains
ROW_SUM_TOL = 1e-9

_redis_client = None
_redis_checked = False


def get_redis_client():
    """Return a connected redis client, or None when caching is unavailable."""
    global _redis_client, _redis_checked
    if _redis_checked:
        return _redis_client
    _redis_checked = True
    if not REDIS_URL:
        return None
    try:
        client = redis.from_url(REDIS_URL)
        client.ping()
        _redis_client = client
        logger.info(f"✅ Redis report cache initialized at {REDIS_URL}")
    except Exception as e:
        logger.warning(f"⚠️ Redis cache not available: {e}; running without cache")
        _redis_client = None
    return _redis_client


def get_report_cache_key(payload: dict) -> str:
    """Generate a cache key for a solve request."""
    blob = json.dumps(payload, sort_keys=True)
    return f"solve:{hashlib.md5(blob.encode()).hexdigest()}"


def get_cached_report(key: str):
    """Get a cached solve report."""
    client = get_redis_client()
    if not client:
        return None
    try:
        cached = client.get(key)
        if cached:
            return json.loads(cached)
    except Exception:
        logger.debug("Report cache lookup failed", exc_info=True)
    return None


def cache_report(key: str, report: dict, ttl: int = 86400):
    """Cache a solve report with TTL (default 1 day)."""
    client = get_redis_client()
    if not client:
        return
    try:
        client.setex(key, ttl, json.dumps(report))
    except Exception:
        logger.debug("Report cache write failed", exc_info=True)
