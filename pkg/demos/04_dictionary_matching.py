"""
Dictionary-based entity matching
================================

Scan raw text for known entity mentions.  At each position the longest
dictionary entry wins and the scan resumes after it, so a compound is
never shadowed by its own suffix.
"""

from pathrel.dictmatch import dict_match, format_standoff

# the three-character compound and its one-character head are both
# dictionary entries; the compound must win where it occurs
text = "山坡上长着白杨树，树下有一条小路。"
dictionary = ["树", "白杨树", "小路"]

print("text:      ", text)
print("dictionary:", "  ".join(dictionary))
print()

matches = dict_match(text, dictionary)
for m in matches:
    print(f"  [{m.start:2d}, {m.end:2d})  {m.surface}")

# the same offsets as standoff TSV, ready to write to a file
print("\nstandoff output:")
print(format_standoff(matches), end="")

# entries never overlap: after a match the scan resumes past it
print("overlap handling:", dict_match("abc", ["ab", "bc", "abc"]))
