import json, logging, os, pathlib, tempfile
from typing import Any, Dict

import numpy as np

from .errors import SignalError

LOGGER_NAME = "specinvert"
log = logging.getLogger(LOGGER_NAME)


def setup_logging(verbose: int = 0):
    """Tagged one-line log records, e.g. `[INFO] pushed 80 frames`."""
    env = os.environ.get("SPECINVERT_LOG_LEVEL", "").strip().upper()
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, env, logging.WARNING) if env else logging.WARNING
    root = logging.getLogger(LOGGER_NAME)
    if not root.handlers:
        h = logging.StreamHandler()
        h.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
        root.addHandler(h)
    root.setLevel(level)
    return root


def ensure_dir(path: str):
    pathlib.Path(path).mkdir(parents=True, exist_ok=True)


def write_json(obj: Dict[str, Any], path: str):
    pathlib.Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, ensure_ascii=False)


def atomic_write_bytes(path: str, payload: bytes):
    """Write to a temp file in the target directory, then rename over `path`."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def as_finite(x, name: str = "input", dtype=np.float64) -> np.ndarray:
    arr = np.asarray(x, dtype=dtype)
    if not np.all(np.isfinite(arr)):
        bad = int(np.size(arr) - np.count_nonzero(np.isfinite(arr)))
        raise SignalError(f"{name} has {bad} non-finite value(s)")
    return arr
