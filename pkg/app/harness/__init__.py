"""
Harness: instance files, generators, verification, benchmarks and rendering
"""

from app.harness.instance_io import InstanceFile, load_family, parse_instance, read_instance, \
    serialize_instance, write_instance
from app.harness.generators import gen

__all__ = [
    "InstanceFile",
    "load_family",
    "parse_instance",
    "read_instance",
    "serialize_instance",
    "write_instance",
    "gen",
]
