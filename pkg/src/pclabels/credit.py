"""Loader for the Default of Credit Card Clients table (UCI, 30,000 clients).

The file is not shipped. Both the original column names (``LIMIT_BAL``,
``PAY_0`` ...) and the ``X1..X23,Y`` variant with a second header line are
accepted, as long as the table has been exported to CSV.
"""
from __future__ import annotations

import csv
import io
import math

from .dataset import Dataset, FormatError, bucketize, from_rows

ENV_VAR = "PCLABELS_CREDIT_CSV"


def _is_number(x: str) -> bool:
    try:
        return math.isfinite(float(x))
    except ValueError:
        return False


def load_credit_card(path: str, bins: int = 5, strategy: str = "equal-width") -> Dataset:
    """Read the table, drop the client id and bucketize its numerical attributes.

    An attribute counts as numerical when every value parses as a number and
    it has more than ``bins`` distinct values; coded categoricals such as
    ``SEX`` or ``MARRIAGE`` stay as they are.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        records = [r for r in csv.reader(io.StringIO(fh.read())) if r]
    if len(records) < 2:
        raise FormatError(f"{path}: no data")
    header, body = records[0], records[1:]
    if body and not any(_is_number(c) for c in body[0]):
        # the spreadsheet export carries a second header with descriptive names
        header, body = body[0], body[1:]
    drop = {i for i, name in enumerate(header) if name.strip().upper() in ("ID", "")}
    keep = [i for i in range(len(header)) if i not in drop]
    names = [header[i].strip() for i in keep]
    rows = [[r[i].strip() for i in keep] for r in body]
    d = from_rows(names, rows)
    for a, attr in enumerate(d.schema):
        if len(attr.domain) > bins and all(_is_number(v) for v in attr.domain):
            d = bucketize(d, a, bins, strategy)
    return d
