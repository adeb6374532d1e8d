import json
import math


def round_half_up(value):
    return int(math.floor(value + 0.5))


def ceil_frames(value):
    # 60 * 2.0 must stay 120 even when the product carries float noise
    return int(math.ceil(round(value, 9)))


def even_sample_indices(start, end, count):
    """
    Pick up to `count` evenly spaced frame indices from [start, end).

    Short intervals yield fewer samples; every index is unique and the
    first and last frames of the interval are always included.
    """
    length = end - start
    if length <= 0 or count <= 0:
        return []
    if length <= count:
        return list(range(start, end))
    if count == 1:
        return [start + (length - 1) // 2]
    step = (length - 1) / (count - 1)
    return [start + round_half_up(i * step) for i in range(count)]


def cosine_similarity(a, b):
    """
    Cosine similarity of two sparse label -> value mappings.

    An empty or all-zero vector has similarity 0 with everything.
    """
    keys = set(a) | set(b)
    dot = sum(a.get(key, 0.0) * b.get(key, 0.0) for key in keys)
    norm_a = math.sqrt(sum(value * value for value in a.values()))
    norm_b = math.sqrt(sum(value * value for value in b.values()))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return dot / (norm_a * norm_b)


def dump_json(data, path):
    # sorted keys and a trailing newline keep reruns byte-identical
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(data, indent=2, sort_keys=True))
        f.write("\n")


def load_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)
