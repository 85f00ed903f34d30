"""Executes a rendered driver script read from stdin.

The driver writes its protocol line to ``__protocol__``. Anything the task
program prints to stdout is discarded so that stdout carries exactly one
line: ``OK <repr>`` or ``ERR <class>: <message>``.
"""
import io
import sys


class _Discard(io.TextIOBase):
    def write(self, s):
        return len(s)


def _one_line(text):
    return " ".join(str(text).split())


def main():
    source = sys.stdin.read()
    protocol = sys.stdout
    sys.stdout = _Discard()
    sys.stdin = io.StringIO("")
    namespace = {"__name__": "__main__", "__protocol__": protocol}
    try:
        code = compile(source, "<task>", "exec")
        exec(code, namespace)
    except BaseException as exc:  # noqa: B902 - SystemExit and friends included
        protocol.write("ERR %s: %s\n" % (type(exc).__name__, _one_line(exc)))
    protocol.flush()


if __name__ == "__main__":
    main()
