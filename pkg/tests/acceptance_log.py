"""One pass/fail line per acceptance criterion, printed in the pytest summary."""

LINES = []


def record(number, title, failures, detail=""):
    ok = not failures
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    if failures:
        line += f"  first failure: {failures[0]}"
    LINES.append(line)
    print(line)
    assert ok, f"{len(failures)} failures, first: {failures[0]}"
