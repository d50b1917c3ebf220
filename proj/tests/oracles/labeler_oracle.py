#!/usr/bin/env python3
"""Independent rule-trace oracle for the risk labeler.

Re-implements normalization, pattern counting and the level rules from their
written definitions, without sharing code with the C++ library, and writes a
golden file of (percent-encoded query, level) pairs.

Usage: labeler_oracle.py OUT.tsv [--seed N]
"""
import argparse
import random
import re

ALPHABETIC = [
    ("union select", 4), ("all", 3), ("and", 3), ("chr", 3), ("=", 3), ("where", 3), ("or", 3),
    ("select", 2), ("as", 2), ("from", 2), ("like", 2), ("union", 2), ("char", 2), ("waitfor", 2),
    ("insert", 2), ("update", 2), ("delete", 2), ("drop", 2), ("table", 2), ("order by", 2),
    ("group by", 2), ("having", 2), ("concat", 2), ("sleep", 2), ("benchmark", 2), ("cast", 2),
    ("null", 2), ("exec", 2), ("declare", 2), ("information", 2),
]
SYMBOLS = [
    ("/*", "C"), ("*/", "C"), ("--", "C"), ("#", "C"), ("%", "C"), (";", "C"), ("'", "A"), ('"', "A"),
    ("<", "B"), (">", "B"), ("(", "B"), (")", "B"), ("=", "C"), (".", "B"), (",", "C"), ("+", "C"),
    ("*", "C"), ("\\x", "A"), ("0x", "A"), (r"\d+", "B"),
]
WHITESPACE = " \t\r\n\f\v"
ENTITIES = {
    "amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'", "nbsp": " ", "sol": "/",
    "bsol": "\\", "num": "#", "percnt": "%", "semi": ";", "colon": ":", "lpar": "(", "rpar": ")",
    "comma": ",", "period": ".", "equals": "=", "plus": "+", "ast": "*", "midast": "*", "excl": "!",
    "quest": "?", "dollar": "$", "hyphen": "-",
}


def l1_of(raw: bytes) -> bytes:
    """Lowercase, drop whitespace, then cut /*...*/ spans until none is left."""
    t = bytes(c for c in raw.lower() if chr(c) not in WHITESPACE)
    while True:
        k = t.find(b"/*")
        if k < 0:
            return t
        j = t.find(b"*/", k + 2)
        t = t[:k] if j < 0 else t[:k] + t[j + 2:]


def percent_decode(s: bytes) -> bytes:
    return re.sub(rb"%([0-9A-Fa-f]{2})", lambda m: bytes([int(m.group(1), 16)]), s)


def entity_decode(s: bytes) -> bytes:
    out = bytearray()
    i = 0
    while i < len(s):
        if s[i:i + 1] != b"&":
            out += s[i:i + 1]
            i += 1
            continue
        semi = s.find(b";", i + 1)
        body = s[i + 1:semi] if semi >= 0 else b""
        cp = None
        if semi >= 0 and 1 <= len(body) <= 10:
            text = body.decode("latin-1")
            m = re.fullmatch(r"#([xX][0-9A-Fa-f]+|[0-9]+)", text)
            if m:
                num = m.group(1)
                value = int(num[1:], 16) if num[0] in "xX" else int(num)
                if 0 < value <= 0x10FFFF and not 0xD800 <= value <= 0xDFFF:
                    cp = value
            elif text in ENTITIES:
                cp = ord(ENTITIES[text])
        if cp is None:
            out += b"&"
            i += 1
        else:
            out += chr(cp).encode("utf-8", "surrogatepass")
            i = semi + 1
    return bytes(out)


def l2_of(raw: bytes) -> bytes:
    decoded = entity_decode(percent_decode(raw))
    return bytes(c for c in decoded if not (chr(c).isascii() and chr(c).isalpha()) and chr(c) not in WHITESPACE)


def select_matches(text: bytes, patterns, digit_index=None):
    """Enumerate every occurrence of every pattern, then keep, scanning left
    to right, the longest occurrence starting at each free position."""
    found = {}
    for idx, pat in patterns:
        start = text.find(pat)
        while start >= 0:
            found.setdefault(start, []).append((len(pat), 1, idx))
            start = text.find(pat, start + 1)
    if digit_index is not None:
        for m in re.finditer(rb"[0-9]+", text):
            for start in range(m.start(), m.end()):
                found.setdefault(start, []).append((m.end() - start, 0, digit_index))
    counts = {}
    i = 0
    while i < len(text):
        if i in found:
            length, _, idx = max(found[i])
            counts[idx] = counts.get(idx, 0) + 1
            i += length
        else:
            i += 1
    return counts


def feature_counts(raw: bytes):
    on_l1, on_l2 = [], []
    for i, (p, _) in enumerate(ALPHABETIC):
        on_l1.append((i, p.replace(" ", "").encode()))
    digit_index = None
    for k, (p, _) in enumerate(SYMBOLS):
        idx = len(ALPHABETIC) + k
        if p == r"\d+":
            digit_index = idx
        elif re.search(r"[a-z]", p):
            on_l1.append((idx, p.encode()))
        else:
            on_l2.append((idx, p.encode()))
    counts = [0] * (len(ALPHABETIC) + len(SYMBOLS))
    for idx, n in select_matches(l1_of(raw), on_l1).items():
        counts[idx] += n
    for idx, n in select_matches(l2_of(raw), on_l2, digit_index).items():
        counts[idx] += n
    return counts


def trace_level(counts):
    present_tiers = [tier for (p, tier), n in zip(ALPHABETIC, counts) if n > 0]
    level = max(present_tiers, default=1)
    groups = {g for (p, g), n in zip(SYMBOLS, counts[len(ALPHABETIC):]) if n > 0}
    if "A" in groups and level < 4:
        level += 1
    if "B" in groups and level < 3:
        level += 1
    if "C" in groups and level < 2:
        level += 1
    return level


CURATED = [
    "", "?id=1 union select * from users--", "'or 1=1--", "select name from items", "uNiOn/**/all",
    "' or 1 = 1--", "id=1' or '1'='1'--", "blue shoes", "page/4", "1", "a.b", "x'", "\"", "--",
    "/*", "*/", "/**/", "UNION SELECT", "UnIoN/**/SeLeCt", "union%20select", "union+select",
    "un/**/ion sel/**/ect", "%27%20OR%201%3D1", "&#39; or &#x31;=1", "&lt;script&gt;", "&quot;",
    "&amp;&amp;", "0x414243", "\\x41\\x42", "char(65)", "chr(65)", "waitfor delay '0:0:5'",
    "1;drop table users", "1 and sleep(5)", "benchmark(1000000,md5(1))", "information_schema.tables",
    "order by 3--", "group by 1 having 1=1", "cast(1 as int)", "null", "exec xp_cmdshell",
    "declare @x int", "like 'a%'", "1/*unterminated", "a/*b*/c/*d", "//**/*x*/", "/ *x* /",
    "select\tfrom\nwhere", "ORDER\r\nBY", "%2f%2a%2a%2f", "%", "%%", "%zz", "&#0;", "&#xD800;",
    "&#1114112;", "&unknown;", "&;", "&#59", "1234567890", "12a34", "a1b2c3", "<>", "()", ",,",
    "++", "**", "#", ";", "'\"", "kitten+video+7", "puppy@home.com", "jobs/3.jpg", "beach, menu",
    "snow from lake", "bike like light",
]

KEYWORDS = ["union", "select", "all", "and", "or", "where", "from", "as", "like", "chr", "char",
            "sleep", "benchmark", "table", "null", "exec", "cast", "order by", "group by", "having",
            "concat", "drop", "insert", "update", "delete", "information", "waitfor", "declare",
            "users", "admin", "id", "name", "x", "version"]
PIECES = ["'", '"', "=", "(", ")", "--", "#", ";", "/*", "*/", "/**/", "%20", "%27", "%3D", "+", ",",
          ".", "*", "<", ">", "0x4142", "\\x41", "&#39;", "&quot;", "&lt;", "%", "1", "42", "7"]
SPACES = [" ", " ", " ", "", "\t", "/**/", "+", "%20"]


def random_query(rng: random.Random) -> str:
    parts = []
    for _ in range(rng.randint(1, 8)):
        r = rng.random()
        if r < 0.45:
            w = rng.choice(KEYWORDS)
            if rng.random() < 0.3:
                w = "".join(c.upper() if rng.random() < 0.5 else c for c in w)
            parts.append(w)
        elif r < 0.85:
            parts.append(rng.choice(PIECES))
        else:
            parts.append(rng.choice(["blue", "shoes", "page", "kitten", "menu", "snow"]))
        parts.append(rng.choice(SPACES))
    return "".join(parts).strip()


def pct(s: bytes) -> str:
    """Percent-encode %, #, tab, control bytes, DEL and non-ASCII for a TSV cell
    (# so no row reads as a comment)."""
    return "".join(f"%{b:02X}" if b in (0x23, 0x25) or b < 0x20 or b >= 0x7F else chr(b) for b in s)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--count", type=int, default=200)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    queries = list(CURATED)
    seen = set(queries)
    while len(queries) < args.count:
        q = random_query(rng)
        if q not in seen:
            seen.add(q)
            queries.append(q)
    with open(args.out, "w") as f:
        f.write("# query (percent-encoded)\tlevel\n")
        for q in queries[:args.count]:
            raw = q.encode("utf-8")
            f.write(f"{pct(raw)}\t{trace_level(feature_counts(raw))}\n")


if __name__ == "__main__":
    main()
