"""Header-carrying TSV artifacts shared by the counts, scores and report writers."""
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from gramdisp.config import RunConfig
from gramdisp.errors import FingerprintMismatch, MalformedLine

_HEADER_KV = re.compile(r"^#\s*([A-Za-z_][A-Za-z0-9_]*)=(.*)$")
_HEADER_KIND = re.compile(r"^#\s*gramdisp\s+(\S+)\s*$")


def header_lines(
    kind: str,
    config: RunConfig,
    corpus_digest: Optional[str] = None,
    notes: Sequence[str] = (),
) -> List[str]:
    """Comment lines echoing the artifact kind, fingerprint and analysis settings."""
    lines = [f"# gramdisp {kind}", f"# fingerprint={config.fingerprint}"]
    if corpus_digest:
        lines.append(f"# corpus_digest={corpus_digest}")
    lines.extend(f"# {line}" for line in config.echo_lines())
    lines.extend(f"# note: {note}" for note in notes)
    return lines


def write_lines(path: Union[str, Path], lines: Iterable[str]) -> Path:
    """Writes UTF-8 text with LF line endings, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    return path


def read_table(
    path: Union[str, Path], columns: Sequence[str]
) -> Tuple[Dict[str, str], List[Tuple[int, List[str]]]]:
    """
    Reads a header-carrying TSV artifact.

    Returns:
        The `key=value` header entries (plus `kind`) and the data rows, each
        paired with its 1-based line number in the file.

    Raises:
        MalformedLine: A missing or unexpected column row, or a short data row.
    """
    header: Dict[str, str] = {}
    rows: List[Tuple[int, List[str]]] = []
    seen_columns = False
    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if line.startswith("#"):
                kind = _HEADER_KIND.match(line)
                if kind:
                    header["kind"] = kind.group(1)
                    continue
                kv = _HEADER_KV.match(line)
                if kv:
                    header[kv.group(1)] = kv.group(2)
                continue
            if not line:
                continue
            fields = line.split("\t")
            if not seen_columns:
                if fields != list(columns):
                    raise MalformedLine(line_no, str(path), f"expected columns {'/'.join(columns)}")
                seen_columns = True
                continue
            if len(fields) != len(columns):
                raise MalformedLine(line_no, str(path), f"expected {len(columns)} fields, got {len(fields)}")
            rows.append((line_no, fields))
    if not seen_columns:
        raise MalformedLine(0, str(path), "no column row")
    return header, rows


def check_fingerprint(header: Dict[str, str], config: RunConfig, what: str) -> None:
    found = header.get("fingerprint", "")
    if found != config.fingerprint:
        raise FingerprintMismatch(config.fingerprint, found or "<none>", what)
