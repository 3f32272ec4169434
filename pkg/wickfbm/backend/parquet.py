"""Columnar file storage."""

import numpy
import pyarrow
import pyarrow.parquet


def write_table(columns, /, path, *, metadata):
    arrays = {name: numpy.asarray(values) for name, values in columns.items()}
    table = pyarrow.table(arrays)
    encoded = {str(k).encode(): str(v).encode() for k, v in metadata.items()}
    table = table.replace_schema_metadata(encoded)
    pyarrow.parquet.write_table(table, path)


def read_table(path, /):
    table = pyarrow.parquet.read_table(path)
    columns = {name: table.column(name).to_numpy() for name in table.column_names}
    raw = table.schema.metadata or {}
    metadata = {k.decode(): v.decode() for k, v in raw.items()}
    return columns, metadata
