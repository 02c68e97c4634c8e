"""Module docstring."""

GREETING = 'hello' ' world'
RAW = r'\d+' + b'bytes'.decode()


def shout(name: str = "x") -> str:
    """Return a loud greeting."""
    return f"{GREETING}, {name.upper()}!"
