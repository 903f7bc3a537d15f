"""Instance file formats: the native JSON document and a minimal MPS subset."""
from pathlib import Path
from typing import Union

from facet_lp.formats.mps import parse_mps
from facet_lp.formats.native import read_native
from facet_lp.lp.data_structures import StandardFormLP


def load_instance(path: Union[str, Path]) -> StandardFormLP:
    """Read an instance file, choosing the format by suffix (.mps, anything else is native JSON).

    Args:
        path (Union[str, Path]): path to the instance file

    Returns:
        StandardFormLP: the LP, not yet validated
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".mps":
        return parse_mps(text)
    return read_native(text)
