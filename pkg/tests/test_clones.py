import pytest

from postforge.snippets.clones import detect_clones
from postforge.snippets.lexer import lex

BLOCK = """\
int total = 0;
for (int i = 0; i < n; i++) {
    total += values[i];
}
int mean = total / n;
int spread = maxValue - minValue;
int scaled = spread * factor;
int result = mean + scaled;
report.add(result);
log.info(result);
"""


def wrap_in_file(block, prefix_lines=3, suffix_lines=2):
    prefix = "\n".join(f"int pad{i} = {i};" for i in range(prefix_lines))
    suffix = "\n".join(f"int tail{i} = {i};" for i in range(suffix_lines))
    return f"{prefix}\n{block}{suffix}\n"


def test_planted_exact_clone_found():
    needle = lex(BLOCK, source_id="question")
    corpus = [lex(wrap_in_file(BLOCK), source_id="Dev.java")]
    matches = detect_clones(needle, corpus, min_lines=6)
    assert len(matches) == 1
    match = matches[0]
    assert match.length_lines == 10
    assert match.corpus_file == "Dev.java"
    assert match.question_range == (1, 10)
    assert match.corpus_range == (4, 13)


def test_disjoint_sources_no_match():
    needle = lex("int a = 1;\nint b = 2;\nint c = 3;\nint d = 4;\nint e = 5;\nint f = 6;")
    corpus = [lex("String s;\nString t;\nString u;\nString v;\nString w;\nString x;")]
    assert detect_clones(needle, corpus, min_lines=2) == []


def test_renamed_clone_needs_normalization():
    renamed = (
        BLOCK.replace("total", "acc")
        .replace("values", "xs")
        .replace("mean", "avg")
        .replace("result", "answer")
        .replace("0", "9")
    )
    needle = lex(renamed, source_id="question")
    corpus = [lex(wrap_in_file(BLOCK), source_id="Dev.java")]
    assert detect_clones(needle, corpus, min_lines=6, normalize=False) == []
    matches = detect_clones(needle, corpus, min_lines=6, normalize=True)
    assert len(matches) == 1
    assert matches[0].length_lines == 10
    assert matches[0].normalized is True


def test_short_matches_below_threshold_dropped():
    needle = lex("int a = 1;\nint b = 2;")
    corpus = [lex("int a = 1;\nint b = 2;")]
    assert detect_clones(needle, corpus, min_lines=3) == []
    assert len(detect_clones(needle, corpus, min_lines=2)) == 1


def test_min_lines_precondition():
    with pytest.raises(ValueError):
        detect_clones(lex("int a;"), [lex("int a;")], min_lines=1)


def test_matches_sorted_by_descending_length():
    long_block = BLOCK
    short_block = "int mean = total / n;\nint spread = maxValue - minValue;\nint scaled = spread * factor;\nint result = mean + scaled;\nreport.add(result);\nlog.info(result);\n"
    needle = lex(long_block, source_id="q")
    corpus = [
        lex(wrap_in_file(short_block), source_id="B.java"),
        lex(wrap_in_file(long_block), source_id="A.java"),
    ]
    matches = detect_clones(needle, corpus, min_lines=6)
    assert [m.length_lines for m in matches] == sorted(
        (m.length_lines for m in matches), reverse=True
    )
    assert matches[0].corpus_file == "A.java"


def test_exact_matching_symmetric_under_swap():
    a = lex(wrap_in_file(BLOCK, 2, 0), source_id="a")
    b = lex(wrap_in_file(BLOCK, 5, 1), source_id="b")
    forward = detect_clones(a, [b], min_lines=6)
    backward = detect_clones(b, [a], min_lines=6)
    assert len(forward) == len(backward) == 1
    assert forward[0].question_range == backward[0].corpus_range
    assert forward[0].corpus_range == backward[0].question_range
    assert forward[0].length_lines == backward[0].length_lines


def test_blank_and_comment_lines_ignored_in_line_count():
    spaced = BLOCK.replace("int mean", "\n// interlude\nint mean")
    needle = lex(spaced, source_id="q")
    corpus = [lex(wrap_in_file(BLOCK), source_id="c")]
    matches = detect_clones(needle, corpus, min_lines=6)
    assert matches and matches[0].length_lines == 10
