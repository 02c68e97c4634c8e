"""Compares the C++ parser's AST graph with CPython's ast module.

Usage: differential_ast.py <codeevo-binary> <file-or-dir>...

Every .py file that CPython accepts must produce the same pre-order
(kind, depth) sequence; files CPython rejects must be rejected too.
Exits non-zero on the first mismatch summary.
"""
import ast
import json
import os
import subprocess
import sys


def reference(src):
    out = []

    def walk(node, depth):
        out.append((type(node).__name__, depth))
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.expr_context, ast.type_ignore)):
                continue
            walk(child, depth + 1)

    walk(ast.parse(src), 0)
    return out


def files(paths):
    for p in paths:
        if os.path.isdir(p):
            for root, _, names in os.walk(p):
                for n in sorted(names):
                    if n.endswith(".py"):
                        yield os.path.join(root, n)
        else:
            yield p


def main():
    binary = sys.argv[1]
    checked = mismatched = 0
    for path in files(sys.argv[2:]):
        try:
            with open(path, encoding="utf-8") as fh:
                src = fh.read()
        except (UnicodeDecodeError, OSError):
            continue
        try:
            expected = reference(src)
        except (SyntaxError, ValueError, RecursionError):
            expected = None
        proc = subprocess.run([binary, "dump-ast", path], capture_output=True, text=True)
        got = None
        if proc.returncode == 0:
            doc = json.loads(proc.stdout)
            got = [(n["kind"], n["depth"]) for n in doc["nodes"]]
        checked += 1
        if expected != got:
            mismatched += 1
            if expected is None or got is None:
                print(f"MISMATCH {path}: cpython={'error' if expected is None else 'ok'} "
                      f"codeevo={'error: ' + proc.stdout.strip()[:200] + proc.stderr.strip()[:200] if got is None else 'ok'}")
            else:
                for i, (a, b) in enumerate(zip(expected, got)):
                    if a != b:
                        break
                else:
                    i = min(len(expected), len(got))
                print(f"MISMATCH {path}: first difference at node {i}: "
                      f"cpython={expected[i:i+3]} codeevo={got[i:i+3]} (sizes {len(expected)} vs {len(got)})")
    print(f"checked {checked} files, {mismatched} mismatches")
    return 1 if mismatched else 0


if __name__ == "__main__":
    sys.exit(main())
