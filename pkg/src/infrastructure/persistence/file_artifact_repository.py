import csv
import io
from pathlib import Path
from typing import Any, Dict, List, Sequence

from src.domain.repositories.artifact_repository import ArtifactRepository
from src.infrastructure.persistence.files import atomic_write_bytes


def format_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class FileArtifactRepository(ArtifactRepository):
    def __init__(self, root: str):
        self.root = Path(root)

    def resolve(self, path: str) -> str:
        return str(self.root / path)

    def write_table(self, path: str, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[format_cell(v) for v in row] for row in rows])
        target = self.resolve(path)
        atomic_write_bytes(target, buffer.getvalue().encode("utf-8"))
        return target

    def append_rows(self, path: str, header: Sequence[str], rows: List[Sequence[Any]], truncate: bool = False) -> str:
        target = Path(self.resolve(path))
        target.parent.mkdir(parents=True, exist_ok=True)
        fresh = truncate or not target.is_file()
        with open(target, "w" if fresh else "a", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            if fresh:
                writer.writerow(header)
            writer.writerows([[format_cell(v) for v in row] for row in rows])
        return str(target)

    def read_table(self, path: str) -> List[Dict[str, str]]:
        with open(self.resolve(path), newline="", encoding="utf-8") as handle:
            return list(csv.DictReader(handle))

    def write_text(self, path: str, text: str) -> str:
        target = self.resolve(path)
        atomic_write_bytes(target, text.encode("utf-8"))
        return target

    def list(self, pattern: str) -> List[str]:
        return sorted(str(p.relative_to(self.root)) for p in self.root.glob(pattern) if p.is_file())
