import csv
import io
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

TOOL_VERSION = "0.1.0"

CSV_COLUMNS = [
    "p",
    "regular",
    "index_of_irregularity",
    "irregular_indices",
    "vandiver",
    "lambda",
    "mu",
    "c_mod_p",
    "condition1",
    "condition2",
    "verdict",
]


class Verdict(str, Enum):
    REGULAR_TRIVIAL = "REGULAR_TRIVIAL"
    CERTIFIED_BY_THEOREM_1 = "CERTIFIED_BY_THEOREM_1"
    NOT_COVERED = "NOT_COVERED"
    INDETERMINATE = "INDETERMINATE"


class WitnessRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: int
    certified: bool


class VandiverRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    status: str
    witnesses: list[WitnessRecord] = Field(default_factory=list)


class Parameters(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    precision: int
    degree_cap: int
    witnesses: int

    def cache_key(self) -> str:
        return f"n{self.level}_N{self.precision}_D{self.degree_cap}_W{self.witnesses}"


class PrimeCertificate(BaseModel):
    """Verdict for one prime together with every quantity it rests on."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    p: int
    regular: bool
    irregular_indices: list[int] = Field(default_factory=list)
    index_of_irregularity: int = 0
    vandiver: list[VandiverRecord] = Field(default_factory=list)
    lambda_: dict[int, int] = Field(default_factory=dict, alias="lambda")
    mu: dict[int, int] = Field(default_factory=dict)
    c_mod_p: dict[int, str] = Field(default_factory=dict)
    condition1: bool = False
    condition2: bool | None = None
    verdict: Verdict
    failing_stage: str | None = None
    tool_version: str = TOOL_VERSION
    parameters: Parameters

    def to_json(self) -> str:
        return self.model_dump_json(indent=4, by_alias=True)

    @classmethod
    def from_json(cls, text: str) -> "PrimeCertificate":
        return cls.model_validate_json(text)

    def csv_row(self) -> list[str]:
        def joined(values) -> str:
            return ";".join(str(v) for v in values)

        def flag(value: bool | None) -> str:
            return "indeterminate" if value is None else str(value).lower()

        return [
            str(self.p),
            flag(self.regular),
            str(self.index_of_irregularity),
            joined(self.irregular_indices),
            joined(v.status for v in self.vandiver),
            joined(self.lambda_.get(k, "") for k in self.irregular_indices),
            joined(self.mu.get(k, "") for k in self.irregular_indices),
            joined(self.c_mod_p.get(k, "") for k in self.irregular_indices),
            flag(self.condition1),
            flag(self.condition2),
            self.verdict.value,
        ]


class ScanSummary(BaseModel):
    total: int
    regular: int
    condition1: int
    certified: int
    regular_fraction: float
    condition1_fraction: float
    certified_fraction: float
    certified_among_irregular: float
    index_histogram: dict[int, int] = Field(default_factory=dict)

    @classmethod
    def from_certificates(cls, certs: list[PrimeCertificate]) -> "ScanSummary":
        total = len(certs)
        regular = sum(c.regular for c in certs)
        condition1 = sum(c.condition1 for c in certs)
        certified = sum(c.verdict is Verdict.CERTIFIED_BY_THEOREM_1 for c in certs)
        histogram: dict[int, int] = {}
        for c in certs:
            histogram[c.index_of_irregularity] = histogram.get(c.index_of_irregularity, 0) + 1

        def share(part: int, whole: int) -> float:
            return part / whole if whole else 0.0

        return cls(
            total=total,
            regular=regular,
            condition1=condition1,
            certified=certified,
            regular_fraction=share(regular, total),
            condition1_fraction=share(condition1, total),
            certified_fraction=share(certified, total),
            certified_among_irregular=share(certified, total - regular),
            index_histogram=dict(sorted(histogram.items())),
        )


def render_csv(certs: list[PrimeCertificate]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cert in certs:
        writer.writerow(cert.csv_row())
    return buffer.getvalue()


def render_certificates(certs: list[PrimeCertificate], output_format: str) -> str:
    if output_format == "csv":
        return render_csv(certs)
    if len(certs) == 1:
        return certs[0].to_json()
    return _CERTIFICATE_LIST.dump_json(certs, indent=4, by_alias=True).decode()


_CERTIFICATE_LIST = TypeAdapter(list[PrimeCertificate])


class ScanReport(BaseModel):
    summary: ScanSummary
    certificates: list[PrimeCertificate] = Field(default_factory=list)

    def to_json(self) -> str:
        return self.model_dump_json(indent=4, by_alias=True)
