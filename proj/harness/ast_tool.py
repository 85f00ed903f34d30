"""Static analysis helpers for task programs. Never executes the source.

Usage: python3 ast_tool.py <mode> < source

Modes:
  names     dotted names referenced by imports, attribute chains and
            __import__('...') calls
  call      names of ``f(<source>)`` after checking that the argument list
            forms exactly one call to f and nothing else
  strip     source without comments and top-level assignments
  dump      syntax tree as nested [label, [children...]] lists
  tokens    operator/operand token lists plus a branch count
  comments  number of comment tokens

Prints one line: ``OK <json>`` or ``ERR <class>: <message>``.
"""
import ast
import io
import json
import keyword
import sys
import tokenize


def _dotted(node):
    parts = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
        return ".".join(reversed(parts))
    return None


def _prefixes(dotted):
    parts = dotted.split(".")
    return [".".join(parts[: i + 1]) for i in range(len(parts))]


def names(source):
    return _names(ast.parse(source))


def call(source):
    tree = ast.parse("f(" + source + "\n)", mode="eval")
    body = tree.body
    if not (isinstance(body, ast.Call) and isinstance(body.func, ast.Name) and body.func.id == "f"):
        raise ValueError("argument list does not form a single call")
    return _names(tree)


def _names(tree):
    found = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                found.update(_prefixes(alias.name))
        elif isinstance(node, ast.ImportFrom):
            if node.module:
                found.update(_prefixes(node.module))
                for alias in node.names:
                    found.add(node.module + "." + alias.name)
        elif isinstance(node, ast.Attribute):
            dotted = _dotted(node)
            if dotted:
                found.update(_prefixes(dotted))
        elif isinstance(node, ast.Call):
            func = node.func
            if (isinstance(func, ast.Name) and func.id == "__import__" and node.args
                    and isinstance(node.args[0], ast.Constant)
                    and isinstance(node.args[0].value, str)):
                found.update(_prefixes(node.args[0].value))
    return sorted(found)


def strip(source):
    tree = ast.parse(source)
    dropped = set()
    for node in tree.body:
        if isinstance(node, (ast.Assign, ast.AnnAssign, ast.AugAssign)):
            dropped.update(range(node.lineno, node.end_lineno + 1))
    comment_col = {}
    for tok in tokenize.generate_tokens(io.StringIO(source).readline):
        if tok.type == tokenize.COMMENT:
            comment_col[tok.start[0]] = tok.start[1]
    out = []
    for number, line in enumerate(source.splitlines(), 1):
        if number in dropped:
            continue
        if number in comment_col:
            line = line[: comment_col[number]].rstrip()
            if not line:
                continue
        out.append(line.rstrip())
    while out and not out[-1]:
        out.pop()
    return "\n".join(out) + "\n"


def _label(node):
    name = type(node).__name__
    if isinstance(node, ast.Name):
        return name + ":" + node.id
    if isinstance(node, ast.Constant):
        return name + ":" + repr(node.value)
    if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        return name + ":" + node.name
    if isinstance(node, ast.arg):
        return name + ":" + node.arg
    if isinstance(node, ast.Attribute):
        return name + ":" + node.attr
    if isinstance(node, ast.alias):
        return name + ":" + node.name
    if isinstance(node, ast.keyword):
        return name + ":" + str(node.arg)
    return name


def _tree(node):
    children = [_tree(child) for child in ast.iter_child_nodes(node)
                if not isinstance(child, ast.expr_context)]
    return [_label(node), children]


def dump(source):
    return _tree(ast.parse(source))


def _branches(tree):
    count = 1
    for node in ast.walk(tree):
        if isinstance(node, (ast.If, ast.For, ast.AsyncFor, ast.While, ast.IfExp,
                             ast.ExceptHandler, ast.match_case)):
            count += 1
        elif isinstance(node, ast.comprehension):
            count += 1 + len(node.ifs)
        elif isinstance(node, ast.BoolOp):
            count += len(node.values) - 1
    return count


def tokens(source):
    tree = ast.parse(source)
    operators, operands = [], []
    for tok in tokenize.generate_tokens(io.StringIO(source).readline):
        if tok.type == tokenize.OP:
            operators.append(tok.string)
        elif tok.type == tokenize.NAME:
            if keyword.iskeyword(tok.string) and tok.string not in ("True", "False", "None"):
                operators.append(tok.string)
            else:
                operands.append(tok.string)
        elif tok.type in (tokenize.NUMBER, tokenize.STRING):
            operands.append(tok.string)
    return {"operators": operators, "operands": operands, "branches": _branches(tree)}


def comments(source):
    return sum(1 for tok in tokenize.generate_tokens(io.StringIO(source).readline)
               if tok.type == tokenize.COMMENT)


MODES = {"names": names, "call": call, "strip": strip, "dump": dump, "tokens": tokens, "comments": comments}


def main():
    if len(sys.argv) != 2 or sys.argv[1] not in MODES:
        sys.stdout.write("ERR UsageError: expected one of %s\n" % ", ".join(sorted(MODES)))
        return
    source = sys.stdin.read()
    try:
        result = MODES[sys.argv[1]](source)
    except BaseException as exc:  # noqa: B902
        sys.stdout.write("ERR %s: %s\n" % (type(exc).__name__, " ".join(str(exc).split())))
        return
    sys.stdout.write("OK " + json.dumps(result, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
