#!/usr/bin/env python3
"""Regenerates include/sqlion/dataset/default_templates.hpp from data/templates."""
import pathlib
import re

root = pathlib.Path(__file__).resolve().parent.parent
header = root / "include/sqlion/dataset/default_templates.hpp"
text = header.read_text()
for name in ("malicious", "legitimate"):
    body = (root / f"data/templates/{name}.txt").read_text()
    pattern = re.compile(r'(inline constexpr std::string_view %s = R"SQLION\().*?(\)SQLION";)' % name, re.S)
    text, n = pattern.subn(lambda m: m.group(1) + body + m.group(2), text)
    assert n == 1, name
header.write_text(text)
