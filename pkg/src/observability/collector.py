"""
Record collector for verifier runs.

Collects trial records, summaries, audit/oracle reports and sweep cells and
writes them as newline-delimited JSON, one record per line, in the order
they were added. Records carry no timing or host data except the run
summary, so identical inputs produce byte-identical trial streams.
"""

from pathlib import Path
from typing import IO, Iterable, Union
import logging

from pydantic import TypeAdapter, ValidationError

from src.core.config import RECORD_SCHEMA_VERSION
from src.models.records import Record

logger = logging.getLogger(__name__)

_record_adapter: TypeAdapter = TypeAdapter(Record)


def dump_record(record: Record) -> str:
    """Single-line JSON for one record."""
    return record.model_dump_json()


class RecordCollector:
    """
    Accumulates records for one command invocation.

    Usage:
        collector = RecordCollector()
        collector.extend(result.records)
        collector.save("out/trials.jsonl")
    """

    def __init__(self) -> None:
        self.records: list[Record] = []
        self.logger = logging.getLogger(self.__class__.__name__)

    def add(self, record: Record) -> None:
        self.records.append(record)

    def extend(self, records: Iterable[Record]) -> None:
        self.records.extend(records)

    def write(self, stream: IO[str]) -> None:
        for record in self.records:
            stream.write(dump_record(record) + "\n")

    def save(self, filepath: Union[Path, str]) -> None:
        """
        Write every record to a JSONL file, replacing it.

        Raises:
            OSError: If the file cannot be written
        """
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(filepath, "w", encoding="utf-8", newline="\n") as f:
                self.write(f)
            self.logger.info(f"Saved {len(self)} records to {filepath}")
        except OSError as e:
            self.logger.error(f"Failed to save records to {filepath}: {e}")
            raise

    def clear(self) -> None:
        self.records.clear()

    def __len__(self) -> int:
        return len(self.records)

    def __repr__(self) -> str:
        kinds: dict[str, int] = {}
        for r in self.records:
            kinds[r.record_type] = kinds.get(r.record_type, 0) + 1
        return f"RecordCollector({', '.join(f'{k}={v}' for k, v in sorted(kinds.items())) or 'empty'})"


def parse_record(line: str) -> Record:
    """
    Parse one JSONL line, dispatching on `record_type`.

    Raises:
        ValueError: If the line is not a valid record
    """
    try:
        record = _record_adapter.validate_json(line)
    except ValidationError as e:
        raise ValueError(f"Invalid record: {e}") from e
    if record.schema_version != RECORD_SCHEMA_VERSION:
        logger.warning(
            f"Schema version mismatch: record={record.schema_version}, current={RECORD_SCHEMA_VERSION}. "
            "Data migration may be needed."
        )
    return record


def read_records(filepath: Union[Path, str]) -> list[Record]:
    """
    Read every record from a JSONL file; blank lines are skipped.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If a line is not a valid record (the line number is reported)
    """
    filepath = Path(filepath)
    if not filepath.exists():
        raise FileNotFoundError(f"Record file not found: {filepath}")

    records = []
    with open(filepath, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse_record(line))
            except ValueError as e:
                raise ValueError(f"{filepath}:{lineno}: {e}") from e
    logger.info(f"Loaded {len(records)} records from {filepath}")
    return records
