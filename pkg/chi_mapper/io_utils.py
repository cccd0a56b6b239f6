import sys
import orjson
from pathlib import Path

STDIO = "-"

def load_json(path):
    if str(path) == STDIO: return orjson.loads(sys.stdin.buffer.read())
    return orjson.loads(Path(path).read_bytes())

def dumps_json(obj) -> str:
    return orjson.dumps(obj, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode("utf-8")

