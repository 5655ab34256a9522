"""Download the benchmark networks and convert them to the canonical edge list.

Canonical files are UTF-8, tab separated, one ``left<TAB>right`` edge per
line, ``#`` comments. A JSON sidecar next to each file records the node
counts, the SHA-256 of the canonical file, the source and the partition
orientation.

Orientation follows the published statistics table: the partition called
"left" is the one whose average degree appears in its "left average degree"
column. For MovieLens that is the movies (100000 / 1682 = 59.45).
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import tempfile
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .bigraph import read_edge_list

log = logging.getLogger(__name__)

DATA_ENV = "BILINK_DATA"


class DatasetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Source:
    url: str
    sha256: str | None
    convert: Callable[[bytes], list[tuple[str, str]]]


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    description: str
    n_left: int
    n_right: int
    m: int
    orientation: str
    sources: tuple[Source, ...] = ()
    canonical_sha256: str | None = None
    aliases: tuple[str, ...] = field(default=())


def _movielens_rows(records):
    # u.data columns: user, item, rating, timestamp; movies go left
    return [(f"movie:{item}", f"user:{user}") for user, item in records]


def _from_udata_zip(blob: bytes):
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        text = zf.read("ml-100k/u.data").decode("latin-1")
    recs = []
    for line in text.splitlines():
        if line.strip():
            user, item = line.split("\t")[:2]
            recs.append((user, item))
    return _movielens_rows(recs)


def _from_widedeep_wheel(blob: bytes):
    import pandas as pd

    member = "pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli"
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        df = pd.read_parquet(io.BytesIO(zf.read(member)))
    return _movielens_rows(zip(df["user_id"].astype(str), df["movie_id"].astype(str)))


def _from_admat(blob: bytes):
    """Drug-target adjacency matrix: header row of drugs, one row per target."""
    lines = [ln for ln in blob.decode("utf-8").splitlines() if ln.strip()]
    drugs = lines[0].split()
    rows = []
    for ln in lines[1:]:
        cols = ln.split()
        target, flags = cols[0], cols[1:]
        if len(flags) != len(drugs):
            raise DatasetError(f"row {target!r} has {len(flags)} entries for {len(drugs)} drugs")
        rows.extend((d, target) for d, f in zip(drugs, flags) if f.strip() == "1")
    return rows


def _from_edge_list(blob: bytes):
    rows = []
    for ln in blob.decode("utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        cols = ln.split("\t") if "\t" in ln else ln.split()
        rows.append((cols[0], cols[1]))
    return rows


_YAMANISHI = "http://web.kuicr.kyoto-u.ac.jp/supp/yoshi/drugtarget/"

REGISTRY: dict[str, DatasetSpec] = {
    "movielens100k": DatasetSpec(
        "movielens100k", "MovieLens 100k ratings; an edge means the user rated the movie",
        1682, 943, 100000, "left=movies, right=users",
        sources=(
            Source("https://files.grouplens.org/datasets/movielens/ml-100k.zip", None,
                   _from_udata_zip),
            # same ratings table, redistributed inside a PyPI wheel
            Source("https://files.pythonhosted.org/packages/a0/ea/"
                   "88e43dd9bc3decb52c148e0c8ce96274bdd872d791d3697b18ce802ef793/"
                   "pytorch_widedeep-1.7.0-py3-none-any.whl",
                   "b3dd4f344680fed047a7ffe3b78b3b65d171521ccdec99eee45513070e6d7187",
                   _from_widedeep_wheel),
        ),
        canonical_sha256="e0fbf4d8dfe3b3b6be0ee656b7b7050b10c9d10682bd5966d820d501e6d8e518",
        aliases=("movielens", "ml100k"),
    ),
    "gpcr": DatasetSpec(
        "gpcr", "Drugs binding G-protein coupled receptors", 223, 95, 635,
        "left=drugs, right=targets",
        sources=(Source(_YAMANISHI + "gpcr_admat_dgc.txt", None, _from_admat),),
        aliases=("gpc_receptors", "gpc"),
    ),
    "ion_channels": DatasetSpec(
        "ion_channels", "Drugs binding ion channel proteins", 210, 204, 1476,
        "left=drugs, right=targets",
        sources=(Source(_YAMANISHI + "ic_admat_dgc.txt", None, _from_admat),),
        aliases=("ion", "ic"),
    ),
    "enzymes": DatasetSpec(
        "enzymes", "Drugs binding enzyme proteins", 445, 664, 2926,
        "left=drugs, right=enzymes",
        sources=(Source(_YAMANISHI + "e_admat_dgc.txt", None, _from_admat),),
        aliases=("enzyme",),
    ),
    # no stable public URL; fetch with source=<local edge list>
    "aid": DatasetSpec(
        "aid", "International aid organisations connected to development issues",
        151, 34, 1889, "left=organisations, right=issues"),
    "ipums": DatasetSpec(
        "ipums", "Industries connected to the fields of education of their employees",
        267, 513, 18088, "left=industries, right=fields of education"),
}


def resolve_name(name: str) -> DatasetSpec:
    key = name.strip().lower().replace("-", "_").replace(" ", "_")
    for spec in REGISTRY.values():
        if key == spec.name or key in spec.aliases:
            return spec
    raise DatasetError(f"unknown dataset {name!r}; known: {', '.join(sorted(REGISTRY))}")


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_ENV, Path.home() / ".cache" / "bilink"))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _download(url: str, timeout: float) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "bilink"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return resp.read()


def canonical_text(spec: DatasetSpec, rows) -> str:
    out = io.StringIO()
    out.write(f"# {spec.name}: {spec.description}\n")
    out.write(f"# {spec.orientation}\n")
    for a, b in rows:
        out.write(f"{a}\t{b}\n")
    return out.getvalue()


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def _cached(path: Path) -> bool:
    side = _sidecar_path(path)
    if not (path.exists() and side.exists()):
        return False
    meta = json.loads(side.read_text())
    return meta.get("sha256") == sha256_file(path)


def fetch_dataset(name: str, destination=None, source=None, timeout: float = 60.0) -> Path:
    """Return the path of the canonical edge list for ``name``.

    Parameters
    ----------
    name : str
        Registry name or alias (see ``REGISTRY``).
    destination : path-like, optional
        Directory holding the canonical files. Defaults to ``$BILINK_DATA``
        or ``~/.cache/bilink``.
    source : path-like, optional
        Local copy of a raw source file, used instead of downloading. It is
        read with the first registered converter, or as an edge list for
        datasets without a download source.

    A cached file whose checksum matches its sidecar is returned without
    any network access.
    """
    spec = resolve_name(name)
    dest = Path(destination) if destination is not None else default_data_dir()
    dest.mkdir(parents=True, exist_ok=True)
    path = dest / f"{spec.name}.tsv"
    if _cached(path):
        log.info("cache hit for %s at %s", spec.name, path)
        return path

    rows = None
    origin = None
    errors = []
    if source is not None:
        blob = Path(source).read_bytes()
        convert = spec.sources[0].convert if spec.sources else _from_edge_list
        rows = convert(blob)
        origin = f"file:{Path(source).resolve()}"
    else:
        if not spec.sources:
            raise DatasetError(f"{spec.name} has no download source; pass source=<local file>")
        for src in spec.sources:
            try:
                blob = _download(src.url, timeout)
            except OSError as exc:
                errors.append(f"{src.url}: {exc}")
                log.warning("download failed: %s (%s)", src.url, exc)
                continue
            digest = hashlib.sha256(blob).hexdigest()
            if src.sha256 is not None and digest != src.sha256:
                raise DatasetError(f"checksum mismatch for {src.url}: {digest}")
            rows = src.convert(blob)
            origin = src.url
            break
        if rows is None:
            raise DatasetError(f"could not download {spec.name}: " + "; ".join(errors))

    text = canonical_text(spec, rows)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    if spec.canonical_sha256 is not None and digest != spec.canonical_sha256:
        raise DatasetError(f"canonical checksum mismatch for {spec.name}: {digest}")
    with tempfile.NamedTemporaryFile("w", dir=dest, delete=False, encoding="utf-8",
                                     suffix=".tmp") as tmp:
        tmp.write(text)
    g, report = read_edge_list(tmp.name)
    if (g.n_left, g.n_right, g.m) != (spec.n_left, spec.n_right, spec.m):
        os.unlink(tmp.name)
        raise DatasetError(
            f"{spec.name}: got {g.n_left}x{g.n_right} nodes and {g.m} edges, "
            f"expected {spec.n_left}x{spec.n_right} and {spec.m}")
    os.replace(tmp.name, path)
    meta = {
        "name": spec.name,
        "n_left": g.n_left,
        "n_right": g.n_right,
        "m": g.m,
        "sha256": digest,
        "source": origin,
        "orientation": spec.orientation,
        "duplicates_dropped": report.duplicates,
    }
    _sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_dataset(name: str, destination=None, **kwargs):
    """Fetch if needed and parse; returns ``(graph, report)``."""
    return read_edge_list(fetch_dataset(name, destination, **kwargs))
