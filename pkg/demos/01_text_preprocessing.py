"""Walk through the text normalization stages on a messy caption.

Run: python demos/01_text_preprocessing.py
"""

from doppel.textprep import demojize, extract_tags, normalize, replace_entities
from doppel.segmentation import default_dictionary, segment_compound

caption = (
    "OMG the BEST night with @barack__obama!! \U0001F525\U0001F60D "
    "tickets at https://tix.example/go or call +1-202-555-0147\n"
    "#makeamericagreatagain #TeamObama :)"
)

print("raw caption:")
print(f"  {caption!r}\n")

step1 = replace_entities(caption)
print("after entity replacement (urls/emails/phones/newlines -> words):")
print(f"  {step1!r}\n")

step2 = demojize(step1)
print("after emoji and emoticon conversion:")
print(f"  {step2!r}\n")

hashtags, mentions = extract_tags(step2)
print(f"extracted hashtags: {hashtags}")
print(f"extracted mentions: {mentions}\n")

tokens = normalize(step2)
print("normalized tokens (lowercased, stopwords removed, stemmed):")
print(f"  {tokens}\n")

dictionary = default_dictionary()
print("compound splitting of the extracted tags:")
for tag in hashtags + mentions:
    cleaned = "".join(ch for ch in tag if ch.isalnum())
    print(f"  {tag:28s} -> {segment_compound(cleaned, dictionary)}")
