#!/usr/bin/env python3
"""Independent reference pipeline for the checked-in golden files.

Everything here is written from scratch in plain Python (re-scanning merge
loop, exhaustive substring search, naive pair-count BPE training) and shares
no code with the Rust crates. Standard BPE on the base vocabulary is also
cross-checked against the HuggingFace `tokenizers` library.

Run from the repository root:  python3 scripts/golden.py
"""
import json
import os
import string

import regex

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIX = os.path.join(ROOT, "fixtures")
GOLD = os.path.join(FIX, "golden")

PAT = regex.compile(r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+""")
MARKER_LINE = "#domain-merges"


def bytes_to_unicode():
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(ord("¡"), ord("¬") + 1)) + list(range(ord("®"), ord("ÿ") + 1))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, map(chr, cs)))


B2U = bytes_to_unicode()


def pre_tokenize(text):
    return ["".join(B2U[b] for b in m.encode("utf-8")) for m in PAT.findall(text)]


def load_vocab(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def load_merges(path):
    base, dom, in_dom = [], [], False
    with open(path, encoding="utf-8") as f:
        for i, line in enumerate(f):
            line = line.rstrip("\n")
            if i == 0 and line.startswith("#version"):
                continue
            if not line.strip():
                continue
            if line.strip() == MARKER_LINE:
                in_dom = True
                continue
            a, b = line.split()
            (dom if in_dom else base).append((a, b))
    return base, dom


def read_lines(path):
    with open(path, encoding="utf-8") as f:
        return [l.rstrip("\n") for l in f if l.strip()]


class Model:
    def __init__(self, vocab, base_merges, domain_tokens=(), domain_merges=()):
        self.vocab = dict(vocab)
        self.plm = max(vocab.values()) + 1
        self.domain = []
        for t in domain_tokens:
            if t and t not in self.vocab and t not in self.domain:
                self.domain.append(t)
        for i, t in enumerate(self.domain):
            self.vocab[t] = self.plm + i
        merges = list(base_merges)
        seen = set(merges)
        for p in domain_merges:
            if p not in seen:
                seen.add(p)
                merges.append(p)
        self.ranks = {p: i for i, p in enumerate(merges)}
        self.domain_set = set(self.domain)

    # the classic loop: pick the least-ranked applicable pair, merge all of its
    # occurrences left to right, repeat
    def merge_loop(self, word):
        word = list(word)
        while len(word) > 1:
            pairs = set(zip(word, word[1:]))
            best = min(pairs, key=lambda p: self.ranks.get(p, float("inf")))
            if best not in self.ranks:
                break
            first, second = best
            new, i = [], 0
            while i < len(word):
                try:
                    j = word.index(first, i)
                except ValueError:
                    new.extend(word[i:])
                    break
                new.extend(word[i:j])
                i = j
                if word[i] == first and i < len(word) - 1 and word[i + 1] == second:
                    new.append(first + second)
                    i += 2
                else:
                    new.append(word[i])
                    i += 1
            word = new
        return word

    def longest_substr(self, remaining):
        n = len(remaining)
        for length in range(n, 0, -1):
            for start in range(0, n - length + 1):
                piece = remaining[start:start + length]
                if None in piece:
                    continue
                if "".join(piece) in self.domain_set:
                    return start, "".join(piece)
        return -1, None

    def adapt_init(self, surface):
        remaining = list(surface)
        split = {}
        while True:
            idx, match = self.longest_substr(remaining)
            if idx == -1:
                break
            split[idx] = match
            for i in range(idx, idx + len(match)):
                remaining[i] = None
        out, i = [], 0
        while i < len(surface):
            if i in split:
                out.append(split[i])
                i += len(split[i])
            else:
                out.append(surface[i])
                i += 1
        return out

    def encode(self, text, adapt):
        tokens = []
        for surface in pre_tokenize(text):
            init = self.adapt_init(surface) if adapt else list(surface)
            for t in self.merge_loop(init):
                if t in self.vocab:
                    tokens.append(t)
                else:
                    tokens.extend(list(t))
        return tokens, [self.vocab[t] for t in tokens]


PUNCT = set(string.punctuation)


def words(text):
    for w in text.split():
        w = w.strip(string.punctuation)
        if w:
            yield w


def count_words(docs):
    counts = {}
    for d in docs:
        for w in words(d):
            counts[w] = counts.get(w, 0) + 1
    return counts


def subwords(model, word, adapt):
    return len(model.encode(" " + word, adapt)[0])


def frag(model, counts, adapt):
    total = sum(counts.values())
    if total == 0:
        return None
    return sum(c * subwords(model, w, adapt) for w, c in counts.items()) / total


def train_naive(surface_counts, target):
    corpus = [(list(w), c) for w, c in sorted(surface_counts.items())]
    merges = []
    while len(merges) < target:
        pc = {}
        for seq, c in corpus:
            for p in zip(seq, seq[1:]):
                pc[p] = pc.get(p, 0) + c
        if not pc:
            break
        best = min(pc, key=lambda p: (-pc[p], p))
        if pc[best] < 2:
            break
        merges.append(best)
        a, b = best
        for k, (seq, c) in enumerate(corpus):
            new, i = [], 0
            while i < len(seq):
                if i + 1 < len(seq) and seq[i] == a and seq[i + 1] == b:
                    new.append(a + b)
                    i += 2
                else:
                    new.append(seq[i])
                    i += 1
            corpus[k] = (new, c)
    return merges


def candidates(base_vocab, base_merges, docs, k, max_merges):
    base = Model(base_vocab, base_merges)
    corpus = count_words(docs)
    pool = {w: c for w, c in corpus.items() if subwords(base, w, False) > k}
    surf = {}
    for w, c in pool.items():
        for s in pre_tokenize(" " + w):
            surf[s] = surf.get(s, 0) + c
    ranked, merges, seen = [], [], set()
    for a, b in train_naive(surf, max_merges):
        t = a + b
        if t in base_vocab or t in seen:
            continue
        seen.add(t)
        ranked.append(t)
        merges.append((a, b))
    return corpus, pool, ranked, merges


def simulate_avocado(base_vocab, base_merges, pool, ranked, merges, gamma, batch):
    size, trajectory = 0, []
    while True:
        m = Model(base_vocab, base_merges, ranked[:size], merges[:size])
        score = frag(m, pool, True)
        trajectory.append([size, score])
        if score is None or score <= gamma:
            return size, True, False, trajectory
        if size >= len(ranked):
            return size, False, True, trajectory
        size = min(size + batch, len(ranked))


def sizesearch(base_vocab, base_merges, corpus, ranked, merges, grid, eps):
    scores = []
    for s in grid:
        m = Model(base_vocab, base_merges, ranked[:s], merges[:s])
        scores.append(frag(m, corpus, True))
    best = min(scores)
    for s, sc in zip(grid, scores):
        if sc <= (1 + eps) * best:
            return min(s, len(ranked)), list(zip(grid, scores))


def hf_check(vocab_path, merges_path, lines):
    try:
        from tokenizers import Tokenizer, models, pre_tokenizers
    except ImportError:
        print("tokenizers not installed; skipping cross-check")
        return
    tok = Tokenizer(models.BPE.from_file(vocab_path, merges_path))
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    vocab = load_vocab(vocab_path)
    base, _ = load_merges(merges_path)
    model = Model(vocab, base)
    for line in lines:
        hf = tok.encode(line).tokens
        ours = model.encode(line, False)[0]
        assert hf == ours, (line, hf, ours)
        hf_pre = [p for p, _ in tok.pre_tokenizer.pre_tokenize_str(line)]
        assert hf_pre == pre_tokenize(line), (line, hf_pre)
    print(f"HF tokenizers agrees on {len(lines)} lines")


def main():
    vocab_path = os.path.join(FIX, "base", "vocab.json")
    merges_path = os.path.join(FIX, "base", "merges.txt")
    base_vocab = load_vocab(vocab_path)
    base_merges, _ = load_merges(merges_path)
    domain_tokens = read_lines(os.path.join(FIX, "domain.txt"))
    with open(os.path.join(FIX, "domain_merges.txt"), encoding="utf-8") as f:
        domain_merges = [tuple(l.split()) for l in f if l.strip()]

    # extended merges document: base rules, marker, new domain rules
    base_set = set(base_merges)
    with open(os.path.join(FIX, "medical", "merges.txt"), "w", encoding="utf-8") as f:
        with open(merges_path, encoding="utf-8") as b:
            f.write(b.read())
        f.write(MARKER_LINE + "\n")
        for a, b2 in domain_merges:
            if (a, b2) not in base_set:
                f.write(f"{a} {b2}\n")

    english = read_lines(os.path.join(FIX, "english.txt"))
    medical = read_lines(os.path.join(FIX, "medical_corpus.txt"))
    toy = read_lines(os.path.join(FIX, "toy_corpus.txt"))
    hf_check(vocab_path, merges_path, english + medical + toy)

    ext = Model(base_vocab, base_merges, domain_tokens, domain_merges)
    for name, adapt in (("bpe", False), ("adaptbpe", True)):
        with open(os.path.join(GOLD, f"tokenize_{name}.jsonl"), "w", encoding="utf-8") as f:
            for line in english + medical:
                toks, ids = ext.encode(line, adapt)
                f.write(json.dumps({"tokens": toks, "ids": ids}, ensure_ascii=False) + "\n")

    example = {
        "word": "hypercholesterolemia",
        "bpe": ext.encode("hypercholesterolemia", False)[0],
        "adaptbpe_init": ext.adapt_init("hypercholesterolemia"),
        "adaptbpe": ext.encode("hypercholesterolemia", True)[0],
    }

    counts = count_words(medical)
    a = frag(ext, counts, False)
    b = frag(ext, counts, True)
    dom_words = {w: c for w, c in counts.items() if ("Ġ" + w) in ext.domain_set}
    compare = {
        "bpe_score": a,
        "adaptbpe_score": b,
        "drop_percent": 100.0 * (a - b) / a,
        "word_count": sum(counts.values()),
        "domain_occurrences": sum(dom_words.values()),
        "min_domain_bpe_subwords": min(subwords(ext, w, False) for w in dom_words),
    }

    gamma, batch, max_merges = 2.0, 4, 20000
    _, pool, ranked, merges = candidates(base_vocab, base_merges, toy, 2, max_merges)
    size, reached, exhausted, traj = simulate_avocado(base_vocab, base_merges, pool, ranked, merges, gamma, batch)
    grid, eps = [0, 50, 100, 200, 300, 500, 1000], 0.01
    corpus1, pool1, ranked1, merges1 = candidates(base_vocab, base_merges, toy, 1, max_merges)
    chosen, grid_scores = sizesearch(base_vocab, base_merges, corpus1, ranked1, merges1, grid, eps)
    builder = {
        "avocado": {
            "gamma": gamma, "batch": batch, "candidate_words": len(pool), "candidates": len(ranked),
            "added": size, "reached_threshold": reached, "exhausted": exhausted, "trajectory": traj,
            "first_candidates": ranked[:10],
        },
        "sizesearch": {
            "grid": grid, "epsilon": eps, "candidate_words": len(pool1), "candidates": len(ranked1),
            "chosen_size": chosen, "scores": grid_scores,
        },
    }

    golden = {"hypercholesterolemia": example, "compare": compare, "builder": builder}
    with open(os.path.join(GOLD, "golden.json"), "w", encoding="utf-8") as f:
        json.dump(golden, f, ensure_ascii=False, indent=2)
        f.write("\n")
    print(json.dumps(golden, ensure_ascii=False, indent=2)[:3000])


if __name__ == "__main__":
    main()
