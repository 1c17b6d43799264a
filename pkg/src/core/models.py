from typing import Any, Final, Optional

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from src.core.enums import (
    AttackKind,
    CollisionPolicy,
    EmbedMode,
    Interpolation,
    StreamOrigin,
    ZeroingAnchor,
)

UInt8Array = npt.NDArray[np.uint8]
BoolArray = npt.NDArray[np.bool_]
IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]

MU_CHAOTIC_FLOOR: Final[float] = 3.57
DEGENERATE_SEEDS: Final = frozenset({0.0, 0.25, 0.5, 0.75, 1.0})


def _read_only(array: npt.NDArray[Any]) -> npt.NDArray[Any]:
    array.setflags(write=False)
    return array


class ArrayModel(BaseModel):
    """Frozen model carrying numpy arrays; compared by value."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        for name in type(self).model_fields:
            mine, theirs = getattr(self, name), getattr(other, name)
            if isinstance(mine, np.ndarray):
                if not np.array_equal(mine, theirs):
                    return False
            elif mine != theirs:
                return False
        return True


class GrayImage(ArrayModel):
    pixels: UInt8Array

    @field_validator("pixels", mode="before")
    @classmethod
    def validate_pixels(cls, v: Any) -> UInt8Array:
        array = np.asarray(v)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError("pixels must be a non-empty height x width raster")
        if array.dtype != np.uint8 and (array.min() < 0 or array.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        return _read_only(array.astype(np.uint8, copy=True))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


class Watermark(ArrayModel):
    bits: BoolArray

    @field_validator("bits", mode="before")
    @classmethod
    def validate_bits(cls, v: Any) -> BoolArray:
        array = np.asarray(v)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError("bits must be a non-empty height x width bitmap")
        return _read_only(array.astype(np.bool_, copy=True))

    @classmethod
    def from_flat(cls, bits: Any, width: int, height: int) -> "Watermark":
        flat = np.asarray(bits, dtype=np.bool_)
        if flat.size != width * height:
            raise ValueError(
                f"{flat.size} bits cannot fill a {width}x{height} watermark"
            )
        return cls(bits=flat.reshape(height, width))

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def size(self) -> int:
        """System size N of the chaotic iterations."""
        return self.width * self.height

    @property
    def flat(self) -> BoolArray:
        return self.bits.reshape(-1)


class BitPlaneLayout(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    msc_mask: int = Field(default=0xF0, ge=0, le=0xFF)
    lsc_mask: int = Field(default=0x0E, ge=0, le=0xFF)

    @model_validator(mode="after")
    def validate_disjoint(self) -> "BitPlaneLayout":
        if self.msc_mask & self.lsc_mask:
            raise ValueError(
                "a coefficient cannot be both MSC and LSC "
                f"(overlap 0x{self.msc_mask & self.lsc_mask:02X})"
            )
        return self

    @property
    def unused_mask(self) -> int:
        return 0xFF & ~(self.msc_mask | self.lsc_mask)

    @property
    def msc_width(self) -> int:
        return bin(self.msc_mask).count("1")

    @property
    def lsc_width(self) -> int:
        return bin(self.lsc_mask).count("1")


class BitStream(ArrayModel):
    bits: BoolArray
    origin: StreamOrigin

    @field_validator("bits", mode="before")
    @classmethod
    def validate_bits(cls, v: Any) -> BoolArray:
        array = np.asarray(v)
        if array.ndim != 1:
            raise ValueError("a bit stream is one-dimensional")
        return _read_only(array.astype(np.bool_, copy=True))

    def __len__(self) -> int:
        return int(self.bits.size)


class SecretKey(BaseModel):
    """Private key: logistic map parameters and the iteration counts."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mu: float = Field(gt=MU_CHAOTIC_FLOOR, le=4.0)
    u0: float = Field(gt=0.0, lt=1.0, repr=False)
    burn_in: int = Field(default=100, ge=0)
    mix_iters: Optional[int] = Field(default=None, ge=1)
    authenticated: bool = False

    @field_validator("u0")
    @classmethod
    def validate_seed(cls, v: float) -> float:
        if v in DEGENERATE_SEEDS:
            raise ValueError(f"u0={v} is a fixed or degenerate point of the map")
        return v

    def resolved_mix_iters(self, system_size: int) -> int:
        """Mixing iterations T; defaults to two visits per watermark bit."""
        return self.mix_iters if self.mix_iters is not None else 2 * system_size


class StrategyStream(ArrayModel):
    values: IntArray
    n: int = Field(ge=1)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: Any) -> IntArray:
        array = np.asarray(v)
        if array.ndim != 1:
            raise ValueError("a strategy is one-dimensional")
        return _read_only(array.astype(np.int64, copy=True))

    @model_validator(mode="after")
    def validate_range(self) -> "StrategyStream":
        if self.values.size and (
            self.values.min() < 1 or self.values.max() > self.n
        ):
            raise ValueError(f"strategy elements must lie in [1, {self.n}]")
        return self

    def __len__(self) -> int:
        return int(self.values.size)


class ChaoticState(ArrayModel):
    x: BoolArray
    step: int = Field(default=0, ge=0)

    @field_validator("x", mode="before")
    @classmethod
    def validate_x(cls, v: Any) -> BoolArray:
        array = np.asarray(v)
        if array.ndim != 1:
            raise ValueError("the system state is a Boolean vector")
        return _read_only(array.astype(np.bool_, copy=True))


class USequence(ArrayModel):
    values: IntArray
    m: int = Field(ge=1)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: Any) -> IntArray:
        return _read_only(np.asarray(v).astype(np.int64, copy=True).reshape(-1))

    @model_validator(mode="after")
    def validate_range(self) -> "USequence":
        if self.values.size and (
            self.values.min() < 0 or self.values.max() >= self.m
        ):
            raise ValueError(f"U-sequence terms must lie in [0, {self.m})")
        return self

    def __len__(self) -> int:
        return int(self.values.size)


class EmbedConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: EmbedMode = EmbedMode.SUBSTITUTE
    layout: BitPlaneLayout = Field(default_factory=BitPlaneLayout)
    collision_policy: CollisionPolicy = CollisionPolicy.PROBE


class SimilarityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    matching_bits: int = Field(ge=0)
    total_bits: int = Field(ge=1)

    @model_validator(mode="after")
    def validate_counts(self) -> "SimilarityReport":
        if self.matching_bits > self.total_bits:
            raise ValueError("matching bits cannot exceed total bits")
        return self

    @property
    def percentage(self) -> float:
        return 100.0 * self.matching_bits / self.total_bits


class AuthenticationVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    report: SimilarityReport
    threshold: float = Field(ge=0.0, le=100.0)

    @property
    def authentic(self) -> bool:
        return self.report.percentage >= self.threshold


class AttackSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: AttackKind
    parameter: float = Field(gt=0.0)
    seed: int = 0
    anchor: ZeroingAnchor = ZeroingAnchor.CENTER
    interpolation: Interpolation = Interpolation.BILINEAR

    @model_validator(mode="after")
    def validate_parameter(self) -> "AttackSpec":
        if self.kind is AttackKind.ZEROING and not float(self.parameter).is_integer():
            raise ValueError("zeroing side must be a whole number of pixels")
        if self.kind is AttackKind.JPEG and self.parameter < 1.0:
            raise ValueError("jpeg ratio must be at least 1")
        return self

    @property
    def label(self) -> str:
        return f"{self.kind.value}_{format_parameter(self.parameter)}"


class ReportRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    attack: AttackKind
    parameter: float
    authenticated: bool
    similarity_pct: Optional[float] = Field(default=None, ge=0.0, le=100.0)
    psnr_db: Optional[float] = None
    seed: Optional[int] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class ExperimentGrid(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    attacks: list[AttackSpec] = Field(min_length=1)
    modes: list[bool] = Field(default_factory=lambda: [False, True], min_length=1)
    key: SecretKey
    carrier: str
    watermark: str
    trials: int = Field(default=1, ge=1)
    embed_config: EmbedConfig = Field(default_factory=EmbedConfig)


def format_parameter(value: float) -> str:
    """Render an attack parameter without a trailing '.0' for whole numbers."""
    return str(int(value)) if float(value).is_integer() else repr(float(value))
