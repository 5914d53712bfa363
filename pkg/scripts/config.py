"""Dataclass configs with command-line overrides (``--field value``)."""
import argparse
import dataclasses
import json
from pathlib import Path


def parse_config(cls, argv=None, description=None):
    defaults = cls()
    p = argparse.ArgumentParser(description=description or cls.__doc__)
    for f in dataclasses.fields(cls):
        value = getattr(defaults, f.name)
        flag = "--" + f.name.replace("_", "-")
        if isinstance(value, bool):
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=value)
        elif isinstance(value, (list, tuple)):
            p.add_argument(flag, nargs="*", default=list(value))
        else:
            p.add_argument(flag, type=type(value), default=value)
    return cls(**vars(p.parse_args(argv)))


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path
