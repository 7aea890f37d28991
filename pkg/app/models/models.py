from pydantic import BaseModel, Field, field_validator, model_validator
from datetime import datetime
from typing import Optional, List
from enum import Enum
from app.config import settings
from app.algebra.fock import Flavor
from app.algebra.invariants import CharacterSource, check_g1_choice
from app.algebra.properties import PROPERTIES
from app.algebra.vecfields import AlgebraType, PolyVectorField
from app.utils.utils import DimensionError

class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"

def _check_even(algebra: AlgebraType, n: int) -> None:
    if algebra is AlgebraType.C and n % 2:
        raise DimensionError(f"type C requires an even dimension N (got N={n})")

# Run configuration
class RunConfig(BaseModel):
    n: int = 2
    type: AlgebraType = AlgebraType.A
    k_max: int = 2
    l_min: Optional[int] = None
    l_max: Optional[int] = None
    flavor: Flavor = Flavor.PLUS
    gamma_degree: Optional[int] = None
    g1: Optional[str] = None
    format: ReportFormat = ReportFormat.JSON
    seed: int = Field(default_factory=lambda: settings.default_seed)
    # not echoed: reports must not depend on the worker count
    threads: int = Field(default_factory=lambda: settings.default_threads, exclude=True)
    properties: Optional[List[str]] = None

    @field_validator('n')
    def validate_n(cls, v):
        """N counts the βγ and bc pairs"""
        if v < 1:
            raise ValueError(f"N must be at least 1 (got N={v})")
        if v > settings.max_n:
            raise ValueError(f"N must be at most {settings.max_n} (got N={v})")
        return v

    @field_validator('k_max')
    def validate_k_max(cls, v):
        if v < 0:
            raise ValueError(f"k_max must be non-negative (got {v})")
        if v > settings.max_kmax:
            raise ValueError(f"k_max must be at most {settings.max_kmax} (got {v})")
        return v

    @field_validator('gamma_degree')
    def validate_gamma_degree(cls, v):
        if v is not None and v < 0:
            raise ValueError(f"gamma degree bound must be non-negative (got {v})")
        return v

    @field_validator('threads')
    def validate_threads(cls, v):
        if v < 1:
            raise ValueError(f"threads must be at least 1 (got {v})")
        return v

    @field_validator('properties')
    def validate_properties(cls, v):
        """Only names from the property suite"""
        if v is None:
            return v
        names = [name.strip() for name in v if name.strip()]
        unknown = [name for name in names if name not in PROPERTIES]
        if unknown:
            raise ValueError(f"unknown properties: {', '.join(unknown)}")
        return names or None

    @model_validator(mode='after')
    def validate_combination(self):
        _check_even(self.type, self.n)
        if self.l_min is not None and self.l_max is not None and self.l_min > self.l_max:
            raise ValueError(f"l_min ({self.l_min}) is larger than l_max ({self.l_max})")
        if self.flavor is Flavor.FULL and self.gamma_degree is None:
            raise ValueError("flavor FULL needs a gamma degree bound")
        if self.g1 is not None:
            self.g1 = check_g1_choice(self.type, PolyVectorField.from_text(self.g1, self.n)).text
        return self

    def g1_field(self) -> Optional[PolyVectorField]:
        return PolyVectorField.from_text(self.g1, self.n) if self.g1 is not None else None

    def includes(self, l: int) -> bool:
        return (self.l_min is None or l >= self.l_min) and (self.l_max is None or l <= self.l_max)

# Report Models
class GradeModel(BaseModel):
    k: int
    l: int

class DimsModel(BaseModel):
    basis: Optional[int] = None
    g0_inv: Optional[int] = None
    full_inv: Optional[int] = None
    oracle: Optional[int] = None

class TableRow(BaseModel):
    grade: GradeModel
    type: Optional[AlgebraType] = None
    dims: DimsModel
    status: Optional[str] = None  # MATCH / GAP
    witnesses: Optional[List[str]] = None

class PropertyStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"

class PropertyResultModel(BaseModel):
    name: str
    status: PropertyStatus
    witness: Optional[str] = None

class RunReport(BaseModel):
    command: str
    config: RunConfig
    tables: List[TableRow] = []
    properties: List[PropertyResultModel] = []
    notes: List[str] = []

    @property
    def failures(self) -> List[PropertyResultModel]:
        return [p for p in self.properties if p.status is PropertyStatus.FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures

# Character tables
class CharacterRequest(BaseModel):
    n: int = 2
    k_max: int = 2
    source: CharacterSource = CharacterSource.WEIGHT_SPACES
    type: AlgebraType = AlgebraType.A

    @field_validator('n')
    def validate_n(cls, v):
        if v < 1:
            raise ValueError(f"N must be at least 1 (got N={v})")
        if v > settings.max_n:
            raise ValueError(f"N must be at most {settings.max_n} (got N={v})")
        return v

    @field_validator('k_max')
    def validate_k_max(cls, v):
        if v < 0:
            raise ValueError(f"k_max must be non-negative (got {v})")
        if v > settings.max_kmax:
            raise ValueError(f"k_max must be at most {settings.max_kmax} (got {v})")
        return v

    @model_validator(mode='after')
    def validate_combination(self):
        _check_even(self.type, self.n)
        return self

class CharacterRow(BaseModel):
    grade: GradeModel
    dim: int

class CharacterResponse(BaseModel):
    source: CharacterSource
    n: int
    k_max: int
    rows: List[CharacterRow]

class HealthResponse(BaseModel):
    status: str
    message: str
    timestamp: datetime

class EvidenceRequest(BaseModel):
    n: int = 3
    k_max: int = Field(default_factory=lambda: settings.conjecture_kmax)

    @field_validator('n')
    def validate_n(cls, v):
        if v < 1:
            raise ValueError(f"N must be at least 1 (got N={v})")
        if v > settings.max_n:
            raise ValueError(f"N must be at most {settings.max_n} (got N={v})")
        return v

    @field_validator('k_max')
    def validate_k_max(cls, v):
        if v < 0:
            raise ValueError(f"k_max must be non-negative (got {v})")
        if v > settings.max_kmax:
            raise ValueError(f"k_max must be at most {settings.max_kmax} (got {v})")
        return v
