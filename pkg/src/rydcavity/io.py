"""CSV/JSON emission and run manifests."""

from __future__ import annotations

import hashlib
import io
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

__all__ = ["format_number", "csv_text", "write_text", "json_text", "manifest", "package_version"]


def format_number(x) -> str:
    """17 significant digits in scientific notation; round-trips every double."""
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.16e" % x


def csv_text(columns, data) -> str:
    """CSV with a ``name[unit]`` header; ``data`` maps column name to a sequence."""
    names = [c[0] for c in columns]
    n = {len(np.atleast_1d(data[k])) for k in names}
    if len(n) != 1:
        raise ValueError(f"columns have unequal lengths: {n}")
    buf = io.StringIO()
    buf.write(",".join(f"{name}[{unit}]" for name, unit in columns) + "\n")
    cols = [np.atleast_1d(data[k]) for k in names]
    for i in range(n.pop()):
        buf.write(",".join(format_number(c[i]) for c in cols) + "\n")
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def json_text(obj) -> str:
    """Indented, key-sorted JSON; non-finite floats become null."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default) + "\n"


def write_text(path, text: str) -> str:
    """Write ``text`` (``"-"`` means stdout) and return its sha256."""
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def package_version() -> str:
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("artifact")
    except PackageNotFoundError:  # running from a source tree
        return "0+unknown"


def manifest(config_digest: str, seed, outputs: dict) -> dict:
    """Run record without timestamps so identical runs give identical manifests."""
    import scipy

    return {
        "config_sha256": config_digest,
        "seed": seed,
        "outputs": outputs,
        "versions": {
            "rydcavity": package_version(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
