"""Tab-separated text formats for families, SNP scans and pedigrees.

Every file starts with a ``#``-prefixed header line naming the columns.
Sibling lists are semicolon-joined so that one family stays on one row.

Family file columns::

    family_id  m  f  c1  c2  sib_genotypes  sib_statuses

Scan file (long format, one row per SNP and family)::

    snp_id  family_id  m  f  c1  c2  sib_genotypes

Pedigree file (affection statuses of additional siblings, shared by all SNPs)::

    family_id  sib_statuses
"""
from collections import OrderedDict

from .genetics import Dataset, FamilyRecord

__all__ = [
    "DataFormatError",
    "FAMILY_COLUMNS",
    "SCAN_COLUMNS",
    "PEDIGREE_COLUMNS",
    "read_families",
    "write_families",
    "format_families",
    "read_pedigree",
    "read_scan",
    "write_tsv",
    "format_value",
]

FAMILY_COLUMNS = ("family_id", "m", "f", "c1", "c2", "sib_genotypes", "sib_statuses")
SCAN_COLUMNS = ("snp_id", "family_id", "m", "f", "c1", "c2", "sib_genotypes")
PEDIGREE_COLUMNS = ("family_id", "sib_statuses")


class DataFormatError(ValueError):
    """Malformed input; the message carries the file name and line number."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


def format_value(x):
    """Stable text form: integers as-is, reals with 10 significant digits."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _rows(path, columns):
    """Yield (line number, fields) for the data rows of a TSV file."""
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read file: {exc.strerror}", path) from exc
    with fh:
        header_seen = False
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                if not header_seen:
                    names = tuple(c.strip() for c in line[1:].split("\t"))
                    if names != tuple(columns):
                        raise DataFormatError(
                            f"header {names} does not match expected {tuple(columns)}", path, lineno
                        )
                    header_seen = True
                continue
            if not header_seen:
                raise DataFormatError("missing '#' header line", path, lineno)
            fields = line.split("\t")
            if len(fields) != len(columns):
                raise DataFormatError(
                    f"expected {len(columns)} tab-separated fields, found {len(fields)}", path, lineno
                )
            yield lineno, fields
        if not header_seen:
            raise DataFormatError("empty file", path)


def _genotype(value, name, path, lineno):
    if value not in ("0", "1", "2"):
        raise DataFormatError(f"{name} must be 0, 1 or 2, got {value!r}", path, lineno)
    return int(value)


def _int_list(value, allowed, name, path, lineno):
    if value == "":
        return []
    out = []
    for token in value.split(";"):
        if token not in allowed:
            raise DataFormatError(f"{name} entry {token!r} not in {sorted(allowed)}", path, lineno)
        out.append(int(token))
    return out


def _family(fid, fields, statuses, path, lineno):
    m, f, c1, c2 = (_genotype(v, k, path, lineno) for v, k in zip(fields, ("m", "f", "c1", "c2")))
    sib_g = _int_list(fields[4], {"0", "1", "2"}, "sib_genotypes", path, lineno)
    if len(sib_g) != len(statuses):
        raise DataFormatError(
            f"family {fid}: {len(sib_g)} sibling genotypes but {len(statuses)} statuses", path, lineno
        )
    try:
        return FamilyRecord(m, f, c1, c2, tuple(zip(sib_g, statuses)), family_id=fid)
    except ValueError as exc:
        raise DataFormatError(str(exc), path, lineno) from exc


def read_families(path):
    """Parse a family file into a Dataset.  Raises DataFormatError."""
    families = []
    seen = set()
    for lineno, fields in _rows(path, FAMILY_COLUMNS):
        fid = fields[0]
        if not fid:
            raise DataFormatError("empty family_id", path, lineno)
        if fid in seen:
            raise DataFormatError(f"duplicate family_id {fid}", path, lineno)
        seen.add(fid)
        statuses = _int_list(fields[6], {"0", "1"}, "sib_statuses", path, lineno)
        families.append(_family(fid, fields[1:6], statuses, path, lineno))
    if not families:
        raise DataFormatError("no families", path)
    return Dataset(families)


def format_families(data):
    lines = ["#" + "\t".join(FAMILY_COLUMNS)]
    for i, fam in enumerate(data.families):
        fid = fam.family_id or f"F{i + 1:05d}"
        sg = ";".join(str(c) for c, _ in fam.siblings)
        ss = ";".join(str(int(d)) for _, d in fam.siblings)
        lines.append("\t".join([fid, str(fam.m), str(fam.f), str(fam.c1), str(fam.c2), sg, ss]))
    return "\n".join(lines) + "\n"


def write_families(data, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_families(data))


def read_pedigree(path):
    """Map family_id -> tuple of additional-sibling statuses."""
    out = {}
    for lineno, (fid, statuses) in _rows(path, PEDIGREE_COLUMNS):
        if fid in out:
            raise DataFormatError(f"duplicate family_id {fid}", path, lineno)
        out[fid] = tuple(_int_list(statuses, {"0", "1"}, "sib_statuses", path, lineno))
    if not out:
        raise DataFormatError("no families", path)
    return out


def read_scan(path, pedigree, min_coverage=1.0):
    """Parse a long-format scan file into an ordered map snp_id -> Dataset.

    Each SNP must cover at least ``min_coverage`` of the pedigree's
    families.  SNP order follows first appearance in the file.
    """
    if not 0 < min_coverage <= 1:
        raise ValueError("min_coverage must lie in (0, 1]")
    snps = OrderedDict()
    first_line = {}
    for lineno, fields in _rows(path, SCAN_COLUMNS):
        snp, fid = fields[0], fields[1]
        if not snp:
            raise DataFormatError("empty snp_id", path, lineno)
        if fid not in pedigree:
            raise DataFormatError(f"family {fid} is not in the pedigree file", path, lineno)
        fams = snps.setdefault(snp, OrderedDict())
        first_line.setdefault(snp, lineno)
        if fid in fams:
            raise DataFormatError(f"duplicate row for SNP {snp}, family {fid}", path, lineno)
        fams[fid] = _family(fid, fields[2:7], pedigree[fid], path, lineno)
    if not snps:
        raise DataFormatError("no SNP rows", path)
    out = OrderedDict()
    for snp, fams in snps.items():
        coverage = len(fams) / len(pedigree)
        if coverage < min_coverage:
            raise DataFormatError(
                f"SNP {snp} covers {len(fams)} of {len(pedigree)} families "
                f"(below {min_coverage:.0%})",
                path,
                first_line[snp],
            )
        out[snp] = Dataset(list(fams.values()))
    return out


def write_tsv(path, columns, rows):
    """Write rows (sequences) under a '#' header; values go through format_value."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#" + "\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(format_value(v) for v in row) + "\n")
