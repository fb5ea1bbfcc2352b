from .main import main, run_text
from .parser import ScriptError, SessionScript, parse

__all__ = ["main", "run_text", "parse", "ScriptError", "SessionScript"]
