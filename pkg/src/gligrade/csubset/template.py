"""Template-region discipline for pre-filled code editors.

A template fences editable ranges with `/*<editable>*/` ... `/*</editable>*/`
marker lines.  Everything outside (the marker lines included) is frozen and
must come back bit-exact; the content of editable ranges is unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass

OPEN_MARKER = "/*<editable>*/"
CLOSE_MARKER = "/*</editable>*/"

TEMPLATE_FROZEN_EDITED = "TEMPLATE_FROZEN_EDITED"


class TemplateMalformed(ValueError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.code = "TEMPLATE_MALFORMED"
        self.detail = detail


@dataclass(frozen=True)
class TemplateIssue:
    code: str
    line: int  # 1-based source line
    detail: str = ""


def _segment(lines: list[str], strict: bool) -> list[tuple[str, list[tuple[int, str]]]]:
    """Split numbered lines into alternating frozen/editable runs.

    Marker lines stay inside the frozen runs.  With `strict`, unbalanced
    markers raise TemplateMalformed (templates must be well formed); student
    sources report instead of raising.
    """
    segments: list[tuple[str, list[tuple[int, str]]]] = [("frozen", [])]
    depth = 0
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped == OPEN_MARKER:
            if depth != 0:
                if strict:
                    raise TemplateMalformed(f"nested editable marker at line {number}")
                return []
            segments[-1][1].append((number, line))
            segments.append(("editable", []))
            depth = 1
        elif stripped == CLOSE_MARKER:
            if depth != 1:
                if strict:
                    raise TemplateMalformed(f"unmatched closing marker at line {number}")
                return []
            segments.append(("frozen", [(number, line)]))
            depth = 0
        else:
            segments[-1][1].append((number, line))
    if depth != 0:
        if strict:
            raise TemplateMalformed("editable region never closed")
        return []
    return segments


def check_template_respect(source: str, template: str) -> list[TemplateIssue]:
    """Report TEMPLATE_FROZEN_EDITED for every frozen source line that
    differs from the template. Raises TemplateMalformed for a bad template."""
    tpl_segments = _segment(template.splitlines(), strict=True)
    src_segments = _segment(source.splitlines(), strict=False)

    tpl_frozen = [seg for kind, seg in tpl_segments if kind == "frozen"]
    src_frozen = [seg for kind, seg in src_segments if kind == "frozen"] if src_segments else None
    if src_frozen is None or len(src_frozen) != len(tpl_frozen):
        return [
            TemplateIssue(TEMPLATE_FROZEN_EDITED, 1, "editable region markers were altered")
        ]

    issues: list[TemplateIssue] = []
    for tpl_run, src_run in zip(tpl_frozen, src_frozen):
        for (tpl_num, tpl_line), (src_num, src_line) in zip(tpl_run, src_run):
            del tpl_num
            if src_line != tpl_line:
                issues.append(TemplateIssue(TEMPLATE_FROZEN_EDITED, src_num))
        if len(src_run) > len(tpl_run):
            for src_num, _ in src_run[len(tpl_run):]:
                issues.append(TemplateIssue(TEMPLATE_FROZEN_EDITED, src_num, "inserted line"))
        elif len(tpl_run) > len(src_run):
            last = src_run[-1][0] if src_run else 1
            issues.append(
                TemplateIssue(
                    TEMPLATE_FROZEN_EDITED,
                    last,
                    f"{len(tpl_run) - len(src_run)} frozen line(s) removed",
                )
            )
    return issues
