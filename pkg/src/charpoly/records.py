"""Result records (CSV / JSON) and the on-disk F_n evaluation cache."""
import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields

from .fneval import FnEvaluation, Method

log = logging.getLogger(__name__)

COLUMNS = ("command", "n", "N", "J", "mu", "omega", "delta", "eps", "method",
           "value_re", "value_im", "abs_error", "samples", "seed", "stream", "wall_ms")
_INT_COLUMNS = {"n", "N", "samples", "seed", "stream"}
_STR_COLUMNS = {"command", "method"}


@dataclass
class ResultRecord:
    command: str
    n: int = None
    N: int = None
    J: float = None
    mu: float = None
    omega: float = None
    delta: float = None
    eps: float = None
    method: str = ""
    value_re: float = math.nan
    value_im: float = 0.0
    abs_error: float = math.nan
    samples: int = None
    seed: int = None
    stream: int = None
    wall_ms: float = 0.0

    @property
    def ok(self):
        return math.isfinite(self.value_re)


def _fmt(key, value):
    if value is None:
        return ""
    if key in _STR_COLUMNS:
        return str(value)
    if key in _INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".17g")


def _parse(key, text):
    if text == "" or text is None:
        return None if key not in _STR_COLUMNS else ""
    if key in _STR_COLUMNS:
        return text
    if key in _INT_COLUMNS:
        return int(text)
    return float(text)


def _json_value(key, value):
    if value is None or key in _STR_COLUMNS or key in _INT_COLUMNS:
        return value if key not in _INT_COLUMNS or value is None else int(value)
    v = float(value)
    # 17 significant digits; non-finite values go through as strings
    return float(format(v, ".17g")) if math.isfinite(v) else format(v)


def write_results(records, path, fmt="csv"):
    """Write records to ``path`` (``-`` or None for a text stream return)."""
    rows = [asdict(r) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(k, row[k]) for k in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([{k: _json_value(k, row[k]) for k in COLUMNS} for row in rows],
                          indent=1) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path in (None, "-"):
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def read_results(path, fmt=None):
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    with open(path, encoding="utf-8") as fh:
        if fmt == "json":
            data = json.load(fh)
            out = []
            for row in data:
                kw = {}
                for k in COLUMNS:
                    v = row.get(k)
                    kw[k] = float(v) if isinstance(v, str) and k not in _STR_COLUMNS else v
                out.append(ResultRecord(**kw))
            return out
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError("unexpected CSV header")
        return [ResultRecord(**{k: _parse(k, v) for k, v in zip(COLUMNS, line)})
                for line in reader]


class FnCache:
    """Directory of JSON files, one per (ensemble/method, n, eps, tol) key.

    Stores go through a temp file plus ``os.replace`` so concurrent writers
    of the same key leave one complete file.  Unreadable entries are misses.
    """

    def __init__(self, path=None):
        path = path or os.environ.get("CHARPOLY_CACHE")
        if not path:
            raise ValueError("no cache path given and CHARPOLY_CACHE is unset")
        self.path = os.fspath(path)
        os.makedirs(self.path, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(n, eps, method, tol):
        canon = json.dumps([int(n), format(float(eps), ".17g"), str(method),
                            format(float(tol), ".17g")])
        return hashlib.sha256(canon.encode()).hexdigest()

    def _file(self, key):
        return os.path.join(self.path, key + ".json")

    def lookup(self, n, eps, method, tol):
        fname = self._file(self.key(n, eps, method, tol))
        try:
            with open(fname, encoding="utf-8") as fh:
                data = json.load(fh)
            names = {f.name for f in fields(FnEvaluation)}
            if set(data) != names:
                raise ValueError("field mismatch")
            data["method"] = Method(data["method"])
            result = FnEvaluation(**data)
        except FileNotFoundError:
            self.misses += 1
            return None
        except (ValueError, TypeError, OSError) as exc:
            log.warning("corrupt cache entry %s ignored: %s", fname, exc)
            self.misses += 1
            return None
        self.hits += 1
        return result

    def store(self, n, eps, method, tol, evaluation):
        data = asdict(evaluation)
        data["method"] = str(getattr(evaluation.method, "value", evaluation.method))
        fd, tmp = tempfile.mkstemp(dir=self.path, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(data, fh)
            os.replace(tmp, self._file(self.key(n, eps, method, tol)))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
