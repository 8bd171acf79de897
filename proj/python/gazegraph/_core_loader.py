"""Locates the compiled extension.

Installed wheels carry _gazegraph next to this file; during development the
CMake build tree is used instead (GAZEGRAPH_EXT_DIR, set by ctest, or a
build/python directory next to the repository root).
"""

import importlib
import os
import sys
from pathlib import Path


def _load():
    try:
        return importlib.import_module("gazegraph._gazegraph")
    except ImportError:
        pass

    candidates = []
    if "GAZEGRAPH_EXT_DIR" in os.environ:
        candidates.append(Path(os.environ["GAZEGRAPH_EXT_DIR"]))
    repo = Path(__file__).resolve().parents[2]
    candidates.append(repo / "build" / "python")

    for cand in candidates:
        if cand.is_dir() and any(cand.glob("_gazegraph*")):
            sys.path.insert(0, str(cand))
            try:
                return importlib.import_module("_gazegraph")
            finally:
                sys.path.pop(0)
    raise ImportError(
        "could not locate the _gazegraph extension; build with CMake or "
        "set GAZEGRAPH_EXT_DIR to the directory containing it"
    )


_core = _load()

action_iou = _core.action_iou
assign_per_frame = _core.assign_per_frame
build_graph = _core.build_graph
execute_program = _core.execute_program
generate_dataset = _core.generate_dataset
ivt_filter = _core.ivt_filter
norm_levenshtein = _core.norm_levenshtein
train_and_evaluate = _core.train_and_evaluate
