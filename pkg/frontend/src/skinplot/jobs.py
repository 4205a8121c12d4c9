"""Plot job description and CSV schema checking."""

import csv
import re


class SchemaMismatch(Exception):
    """Input CSV does not carry the columns a plot kind expects."""


class PlotJob:
    def __init__(self, kind, input_csv, output_image, options=None):
        if kind not in KINDS:
            raise ValueError("unknown plot kind %r" % kind)
        self.kind = kind
        self.input_csv = input_csv
        self.output_image = output_image
        self.options = dict(options or {})


# required columns per kind; a trailing "*" matches a numbered family
KINDS = {
    "density_heatmap": ["t", "n_*"],
    "steady_profile": ["t", "n_*"],
    "pseudo_contour": ["re", "im", "log10_smin"],
    "wavefunction_log": ["site", "index", "abs_psi"],
    "norm_growth": ["t", "log_norm"],
    "spectrum_scatter": ["re", "im"],
}


def read_table(path, kind):
    """Parse the CSV and check it against the kind's schema.

    Returns (header, rows) with rows as lists of floats. Raises
    SchemaMismatch naming the first offending column.
    """
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch("empty file, expected columns %s"
                                 % ", ".join(KINDS[kind]))
        rows = [row for row in reader if row]
    for col in KINDS[kind]:
        if col.endswith("*"):
            pat = re.compile(re.escape(col[:-1]) + r"\d+$")
            if not any(pat.match(h) for h in header):
                raise SchemaMismatch("missing column family %r" % col)
        elif col not in header:
            raise SchemaMismatch("missing column %r" % col)
    if not rows:
        raise SchemaMismatch("no data rows under columns %s" % ", ".join(header))
    data = []
    for row in rows:
        if len(row) != len(header):
            raise SchemaMismatch("row with %d fields under %d columns"
                                 % (len(row), len(header)))
        data.append([_cell(x) for x in row])
    return header, data


def _cell(text):
    if text == "":
        return float("nan")
    try:
        return float(text)
    except ValueError:
        raise SchemaMismatch("non-numeric cell %r" % text)


def density_columns(header):
    """Indices of the site-occupation columns, in site order."""
    pat = re.compile(r"n_(\d+)$")
    cols = []
    for i, h in enumerate(header):
        m = pat.match(h)
        if m:
            cols.append((int(m.group(1)), i))
    cols.sort()
    return [i for _, i in cols]
