"""
Instance files
- Pydantic models for region families plus an optional hidden realization
- Rationals travel as "p/q" (or decimal) strings so no precision is lost
- Canonical JSON: sorted keys, fixed indentation, rationals in lowest terms
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from app.config import FamilyMode, settings
from app.exceptions import InstanceFormatError, ReconstructionException
from app.geometry.primitives import Point
from app.regions.family import Family, Realization, RegionDesc, RegionKind, build_family
from app.regions.sampling import sample_realization

logger = logging.getLogger("instance_io")

Rational = str
Pair = List[Rational]


def encode_rational(value) -> Rational:
    return str(Fraction(value))


def decode_rational(text: Union[str, int]) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InstanceFormatError(f"not a rational number: {text!r}")


def _canonical_pair(pair: List) -> Pair:
    if len(pair) != 2:
        raise ValueError(f"expected an (x, y) pair, got {pair!r}")
    return [encode_rational(decode_rational(v)) for v in pair]


def _point_of(pair: Pair) -> Point:
    return Point(decode_rational(pair[0]), decode_rational(pair[1]))


# ==================== MODELS ====================

class RegionModel(BaseModel):
    """One region as stored on disk"""
    model_config = ConfigDict(extra="forbid")

    id: int
    kind: Literal["point", "polygon", "disk"]
    point: Optional[Pair] = None
    vertices: Optional[List[Pair]] = None
    center: Optional[Pair] = None
    radius: Optional[Rational] = None

    @field_validator("point", "center", mode="before")
    @classmethod
    def _pair(cls, value):
        return None if value is None else _canonical_pair(value)

    @field_validator("vertices", mode="before")
    @classmethod
    def _pairs(cls, value):
        return None if value is None else [_canonical_pair(v) for v in value]

    @field_validator("radius", mode="before")
    @classmethod
    def _radius(cls, value):
        return None if value is None else encode_rational(decode_rational(value))

    def to_desc(self) -> RegionDesc:
        if self.kind == RegionKind.POINT.value:
            if self.point is None:
                raise InstanceFormatError(f"region {self.id}: point region without 'point'")
            return RegionDesc.point_region(self.id, _point_of(self.point))
        if self.kind == RegionKind.POLYGON.value:
            if not self.vertices:
                raise InstanceFormatError(f"region {self.id}: polygon without 'vertices'")
            return RegionDesc.polygon(self.id, [_point_of(v) for v in self.vertices])
        if self.center is None or self.radius is None:
            raise InstanceFormatError(f"region {self.id}: disk needs 'center' and 'radius'")
        return RegionDesc.disk(self.id, _point_of(self.center), decode_rational(self.radius))

    @classmethod
    def from_desc(cls, desc: RegionDesc) -> "RegionModel":
        if desc.kind == RegionKind.POINT:
            return cls(id=desc.rid, kind="point", point=list(desc.point))
        if desc.kind == RegionKind.POLYGON:
            return cls(id=desc.rid, kind="polygon", vertices=[list(v) for v in desc.vertices])
        if desc.kind == RegionKind.DISK:
            return cls(id=desc.rid, kind="disk", center=list(desc.center), radius=desc.radius)
        raise InstanceFormatError(f"region {desc.rid}: sentinels are not stored in instances")


class InstanceFile(BaseModel):
    """A region family, its parameters and (optionally) the hidden points"""
    model_config = ConfigDict(extra="forbid")

    version: str = settings.INSTANCE_VERSION
    mode: FamilyMode
    k: int
    regions: List[RegionModel]
    realization: Optional[Dict[str, Pair]] = None
    seed: Optional[int] = None

    @field_validator("regions")
    @classmethod
    def _sorted_regions(cls, value: List[RegionModel]) -> List[RegionModel]:
        return sorted(value, key=lambda r: r.id)

    @field_validator("realization", mode="before")
    @classmethod
    def _realization(cls, value):
        if value is None:
            return None
        return {str(int(rid)): _canonical_pair(pair) for rid, pair in value.items()}

    @property
    def n(self) -> int:
        return len(self.regions)

    def descs(self) -> List[RegionDesc]:
        return [r.to_desc() for r in self.regions]

    def to_family(self) -> Family:
        return build_family(self.descs(), self.mode, self.k)

    def hidden(self, family: Optional[Family] = None) -> Realization:
        """
        Hidden realization: the explicit one when present, else sampled from the seed

        Args:
            family: family built from this instance (built on demand)

        Returns:
            Realization: validated against the original regions
        """
        family = family or self.to_family()
        if self.realization is not None:
            points = {int(rid): _point_of(pair) for rid, pair in self.realization.items()}
            for rid in family.ids:
                if rid not in points and family.is_point(rid):
                    points[rid] = family.region(rid).point
            hidden = Realization(points)
        else:
            seed = settings.DEFAULT_SEED if self.seed is None else self.seed
            hidden = sample_realization(family, seed)
        hidden.validate(family)
        return hidden

    @classmethod
    def from_family(cls, family: Family, realization: Optional[Realization] = None,
                    seed: Optional[int] = None) -> "InstanceFile":
        regions = [RegionModel.from_desc(family.original[rid]) for rid in family.ids]
        stored = None
        if realization is not None:
            stored = {str(rid): list(p) for rid, p in sorted(realization.points.items())}
        return cls(mode=family.mode, k=family.k, regions=regions,
                   realization=stored, seed=seed)


# ==================== SERIALIZATION ====================

def serialize_instance(instance: InstanceFile) -> str:
    payload = instance.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def parse_instance(text: str, strict: bool = False) -> InstanceFile:
    """
    Parse an instance file

    Args:
        text: file contents
        strict: reject files that are not already in canonical form

    Returns:
        InstanceFile: validated instance
    """
    try:
        instance = InstanceFile.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"instance is not valid JSON: {e}")
    except ValidationError as e:
        raise InstanceFormatError(f"invalid instance: {e.errors()[0]['msg']}")
    if instance.version != settings.INSTANCE_VERSION:
        raise InstanceFormatError(
            f"unsupported instance version {instance.version!r}, expected {settings.INSTANCE_VERSION!r}")
    if strict and serialize_instance(instance) != text:
        raise InstanceFormatError("instance is not in canonical form")
    return instance


def canonicalize(text: str) -> str:
    return serialize_instance(parse_instance(text))


def read_instance(path: Union[str, Path], strict: bool = False) -> InstanceFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError(f"cannot read instance {path}: {e}")
    instance = parse_instance(text, strict=strict)
    logger.info(f"📂 Loaded {instance.mode.value} instance with {instance.n} regions from {path}")
    return instance


def write_instance(instance: InstanceFile, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(instance), encoding="utf-8")
    logger.info(f"💾 Wrote {instance.mode.value} instance with {instance.n} regions to {path}")
    return path


def load_family(instance: InstanceFile):
    """Family and hidden realization of an instance; validation errors keep their type"""
    try:
        family = instance.to_family()
        return family, instance.hidden(family)
    except ReconstructionException:
        raise
    except (TypeError, ValueError) as e:
        raise InstanceFormatError(f"instance does not describe a valid family: {e}")


__all__ = [
    "RegionModel",
    "InstanceFile",
    "encode_rational",
    "decode_rational",
    "serialize_instance",
    "parse_instance",
    "canonicalize",
    "read_instance",
    "write_instance",
    "load_family",
]
