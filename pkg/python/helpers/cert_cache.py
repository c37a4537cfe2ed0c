"""Append-only certificate store, one JSON file per (p, parameters)."""

import os
import re
from dataclasses import dataclass

from pydantic import ValidationError

from python.helpers import files
from python.helpers.certificate import Parameters, PrimeCertificate
from python.helpers.errors import CacheCorruptionError
from python.helpers.print_style import PrintStyle

FILE_PATTERN = re.compile(r"^p(\d+)_n(\d+)_N(\d+)_D(\d+)_W(\d+)\.json$")


@dataclass
class CacheEntry:
    p: int
    parameters: Parameters
    path: str


class CertificateCache:
    def __init__(self, directory: str):
        self.directory = files.get_abs_path(directory)

    def file_name(self, p: int, parameters: Parameters) -> str:
        return f"p{p}_{parameters.cache_key()}.json"

    def path(self, p: int, parameters: Parameters) -> str:
        return os.path.join(self.directory, self.file_name(p, parameters))

    def entries(self) -> list[CacheEntry]:
        out = []
        for name in files.list_files(self.directory, "p*.json"):
            match = FILE_PATTERN.match(name)
            if not match:
                continue
            p, n, N, D, W = (int(x) for x in match.groups())
            out.append(
                CacheEntry(
                    p,
                    Parameters(level=n, precision=N, degree_cap=D, witnesses=W),
                    os.path.join(self.directory, name),
                )
            )
        return sorted(out, key=lambda e: (e.p, e.parameters.cache_key()))

    def read(self, path: str) -> PrimeCertificate:
        try:
            return PrimeCertificate.from_json(files.read_file(path))
        except (OSError, ValueError, ValidationError) as e:
            raise CacheCorruptionError(path, str(e).splitlines()[0]) from e

    def load(self, p: int, parameters: Parameters) -> PrimeCertificate | None:
        """Cached certificate, or None when absent or corrupt (corruption is reported)."""
        path = self.path(p, parameters)
        if not os.path.exists(path):
            return None
        try:
            cert = self.read(path)
        except CacheCorruptionError as e:
            PrintStyle.error(str(e))
            return None
        if cert.p != p or cert.parameters != parameters:
            PrintStyle.error(f"certificate {path} does not match its file name")
            return None
        return cert

    def store(self, cert: PrimeCertificate) -> bool:
        """Write once; an existing file (valid or corrupt) is never replaced."""
        path = self.path(cert.p, cert.parameters)
        if os.path.exists(path):
            return False
        files.write_file_atomic(path, cert.to_json())
        return True

    def clear(self) -> int:
        entries = self.entries()
        for entry in entries:
            files.delete_file(entry.path)
        return len(entries)
