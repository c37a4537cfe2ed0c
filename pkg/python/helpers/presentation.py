"""JSON schema for module presentations fed to the koszul command.

    {"p": 3, "precision": 3, "r": 1, "degree_cap": 9, "generators": 1,
     "relations": [[[[3, 0]]], [[[1, 1]]]]}

A relation is a list with one polynomial per generator; a polynomial is a
list of terms [coeff, e_1, ..., e_r].
"""

from pydantic import BaseModel, Field, ValidationError, model_validator
import sympy

from python.helpers.errors import SchemaError

Term = list[int]
Polynomial = list[Term]


class PresentationSchema(BaseModel):
    p: int
    precision: int = Field(ge=1)
    r: int = Field(ge=1)
    degree_cap: int = Field(ge=1)
    generators: int = Field(ge=0)
    relations: list[list[Polynomial]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_shapes(self) -> "PresentationSchema":
        if self.p < 3 or not sympy.isprime(self.p):
            raise ValueError(f"p = {self.p} is not an odd prime")
        for k, rel in enumerate(self.relations):
            if len(rel) != self.generators:
                raise ValueError(
                    f"relation {k} has {len(rel)} polynomials for {self.generators} generators"
                )
            for poly in rel:
                for term in poly:
                    if len(term) != self.r + 1:
                        raise ValueError(f"term {term} in relation {k} needs {self.r} exponents")
                    if any(e < 0 for e in term[1:]):
                        raise ValueError(f"term {term} in relation {k} has a negative exponent")
        return self


def parse_presentation(text: str) -> PresentationSchema:
    try:
        return PresentationSchema.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"invalid presentation: {e}") from e
