import sys
from pathlib import Path

# Allow running the suite from a fresh checkout without installing.
_src = Path(__file__).resolve().parent.parent / "src"
if str(_src) not in sys.path:
    try:
        import hbvm  # noqa: F401
    except ImportError:
        sys.path.insert(0, str(_src))
