import csv
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

type Cell = str | int | float | bool | None


def _format(cell: Cell) -> str:
    match cell:
        case None:
            return ""
        case bool():
            return "1" if cell else "0"
        case float():
            return repr(cell)
        case _:
            return str(cell)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Cell]],
    meta: Mapping[str, Cell],
) -> None:
    """Write rows under a leading `# key=value, ...` provenance line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as file:
        file.write("# " + ", ".join(f"{key}={_format(value)}" for key, value in meta.items()))
        file.write("\n")
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(cell) for cell in row])


def read_csv(path: Path) -> tuple[str, list[dict[str, str]]]:
    """Provenance line and data rows of a file written by `write_csv`."""
    with path.open(newline="") as file:
        meta = file.readline().removeprefix("# ").rstrip("\n")
        return meta, list(csv.DictReader(file))
