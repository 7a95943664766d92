from enum import Enum
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TrapShape(str, Enum):
    ISOTROPIC = "isotropic"
    DISK = "disk"
    CIGAR = "cigar"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for member in cls:
                if member.value == value.strip().lower():
                    return member
        return None


class TrapSpec(BaseModel):
    """Harmonic trap geometry in reduced units (loosest frequency = 1)"""

    model_config = ConfigDict(frozen=True)

    shape: TrapShape
    s: float = Field(..., ge=1.0, description="Anisotropy parameter")
    spacings: Tuple[float, float, float] = Field(..., description="Per-axis level spacings in units of hbar*omega")

    @property
    def max_spacing(self) -> float:
        return max(self.spacings)

    @property
    def exponent(self) -> float:
        """Exponent n of the s**n prefactor of Tc0"""
        return {TrapShape.ISOTROPIC: 0.0, TrapShape.DISK: 1.0 / 3.0, TrapShape.CIGAR: 2.0 / 3.0}[self.shape]


class SeriesResult(BaseModel):
    value: float
    terms_used: int = Field(..., ge=1)
    bound: float = Field(..., ge=0.0, description="Upper bound on the truncation error")


class GasState(BaseModel):
    """Grand-canonical equilibrium point on the discrete trap spectrum"""

    model_config = ConfigDict(frozen=True)

    trap: TrapSpec
    n_atoms: float = Field(..., gt=0.0)
    t: float = Field(..., gt=0.0, description="Reduced temperature k_B T / (hbar omega)")
    z: float = Field(..., gt=0.0, lt=1.0, description="Fugacity exp((mu - E0) / k_B T)")
    log_z: float = Field(..., lt=0.0, description="ln z, the coordinate the solver works in")
    n0: float = Field(..., ge=0.0, description="Ground-state occupation")
    f0: float = Field(..., ge=0.0, le=1.0, description="Condensate fraction n0 / N")
    residual: float = Field(0.0, ge=0.0, description="Relative particle-number closure error")


class ThresholdResult(BaseModel):
    t_threshold: float
    target_fraction: float
    iterations: int
    residual: float


class SemiclassicalResult(BaseModel):
    t_c0: float
    t_c_first_order: float
    correction: float = Field(..., description="Relative shift dTc/Tc0")


class ValidityReport(BaseModel):
    shape: TrapShape
    s: float
    n_atoms: float
    threshold: float
    criterion_lhs: float = Field(..., description="k_B Tc0 in units of hbar*omega")
    criterion_rhs: float = Field(..., description="threshold * max spacing")
    n_min: float
    s_max: float
    valid: bool
    margin: float


class Column(BaseModel):
    name: str
    unit: str = "1"

    @property
    def header(self) -> str:
        return f"{self.name}[{self.unit}]"


class SweepTable(BaseModel):
    columns: List[Column]
    rows: List[Tuple[float, ...]] = Field(default=[])
    metadata: Dict[str, Any] = Field(default={})

    @model_validator(mode="after")
    def _check_shape(self) -> "SweepTable":
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} entries, expected {width}")
        keys = [row[0] for row in self.rows]
        if any(b < a for a, b in zip(keys, keys[1:])):
            raise ValueError("rows must be sorted by the first column")
        return self

    @property
    def headers(self) -> List[str]:
        return [column.header for column in self.columns]

    def column(self, name: str) -> List[float]:
        """Values of one column, looked up by name"""
        index = [column.name for column in self.columns].index(name)
        return [row[index] for row in self.rows]
