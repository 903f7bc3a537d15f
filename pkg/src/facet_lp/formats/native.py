"""Native JSON document for LP instances with an optional plant-metadata sidecar.

The document stores A row-major next to b, c and optional variable names. Floats are written in
Python's shortest round-trip representation, so a write followed by a read is lossless.
"""
import json
from dataclasses import asdict
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Union

import numpy as np
from atomicwrites import atomic_write

from facet_lp.errors import CorruptDocument
from facet_lp.errors import SchemaVersionUnknown
from facet_lp.lp.data_structures import StandardFormLP


SCHEMA_VERSION = 1
FIELDS = {"schema_version", "m", "n", "a", "b", "c", "names", "plant"}


@dataclass
class NativeInstanceDocument:
    """Serializable form of a standard-form LP.

    The plant sidecar holds generator metadata (certificates, permutation, seeds) and is passed
    through without interpretation.
    """

    schema_version: int
    m: int
    n: int
    a: List[float]
    b: List[float]
    c: List[float]
    names: Optional[List[str]] = None
    plant: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        """Check the schema version and the entry counts."""
        if self.schema_version != SCHEMA_VERSION:
            raise SchemaVersionUnknown(
                f"Schema version {self.schema_version!r} is not supported "
                f"(expected {SCHEMA_VERSION})."
            )
        if not isinstance(self.m, int) or not isinstance(self.n, int) or self.m < 1 or self.n < 1:
            raise CorruptDocument(
                f"Dimensions must be positive integers, got m={self.m!r}, n={self.n!r}."
            )
        counts = {"a": self.m * self.n, "b": self.m, "c": self.n}
        for key, expected in counts.items():
            values = getattr(self, key)
            if not isinstance(values, list) or len(values) != expected:
                raise CorruptDocument(f"Field {key!r} must hold {expected} entries.")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                raise CorruptDocument(f"Field {key!r} holds non-numeric entries.")
        if self.names is not None and len(self.names) != self.n:
            raise CorruptDocument(f"Field 'names' must hold {self.n} entries.")

    def save_to_json(self, path: Union[str, Path]) -> None:
        """Save the document to a JSON file.

        Args:
            path (Union[str, Path]): path to the JSON file
        """
        with atomic_write(path, mode="w", overwrite=True, encoding="utf-8") as outfile:
            outfile.write(write_native(self))
            outfile.write("\n")


def decode_document(dct: Dict[str, Any]) -> Union[NativeInstanceDocument, Dict[str, Any]]:
    """Deserialize the top-level JSON object into a NativeInstanceDocument.

    Nested objects, such as the plant sidecar, are returned unchanged.

    Args:
        dct (dict): a (nested) dict of the JSON file

    Returns:
        Union[NativeInstanceDocument, dict]: the document, or the dict itself when nested
    """
    if "schema_version" not in dct:
        return dct
    unknown = set(dct) - FIELDS
    if unknown:
        raise CorruptDocument(f"Unknown fields {sorted(unknown)}.")
    try:
        return NativeInstanceDocument(**dct)
    except TypeError as err:
        raise CorruptDocument(f"Missing fields: {err}") from err


def decode_native(text: str) -> NativeInstanceDocument:
    """Parse a native document from its JSON text.

    Args:
        text (str): the JSON text

    Returns:
        NativeInstanceDocument: the document

    Raises:
        CorruptDocument: the text is not a valid document
        SchemaVersionUnknown: the schema version is not recognized
    """
    try:
        document = json.loads(text, object_hook=decode_document)
    except json.JSONDecodeError as err:
        raise CorruptDocument(f"Invalid JSON: {err}") from err
    if not isinstance(document, NativeInstanceDocument):
        raise CorruptDocument("Document has no schema_version field.")
    return document


def write_native(doc: NativeInstanceDocument) -> str:
    """Serialize a document to JSON text.

    Args:
        doc (NativeInstanceDocument): the document

    Returns:
        str: the JSON text
    """
    return json.dumps(asdict(doc), ensure_ascii=False, indent=2, allow_nan=False)


def from_lp(lp: StandardFormLP, plant: Optional[Dict[str, Any]] = None) -> NativeInstanceDocument:
    """Document for an LP, with an optional plant sidecar.

    Args:
        lp (StandardFormLP): the LP
        plant (dict, optional): plant metadata

    Returns:
        NativeInstanceDocument: the document
    """
    return NativeInstanceDocument(
        schema_version=SCHEMA_VERSION,
        m=lp.m,
        n=lp.n,
        a=[float(v) for v in lp.A.ravel()],
        b=[float(v) for v in lp.b],
        c=[float(v) for v in lp.objective],
        names=list(lp.names) if lp.names is not None else None,
        plant=plant,
    )


def to_lp(doc: NativeInstanceDocument) -> StandardFormLP:
    """LP described by a document.

    Args:
        doc (NativeInstanceDocument): the document

    Returns:
        StandardFormLP: the LP, not yet validated
    """
    A = np.array(doc.a, dtype=float).reshape(doc.m, doc.n)
    names = tuple(doc.names) if doc.names is not None else None
    return StandardFormLP(A, np.array(doc.b, dtype=float), np.array(doc.c, dtype=float), names)


def read_native(text: str) -> StandardFormLP:
    """Parse a native document and return its LP.

    Args:
        text (str): the JSON text

    Returns:
        StandardFormLP: the LP, not yet validated
    """
    return to_lp(decode_native(text))
