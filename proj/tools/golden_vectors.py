"""Reference generator for the frozen keystream fixtures.

Pure-Python ChaCha20 (64-bit nonce/counter), HMAC-SHA256 subkeys, rejection
sampling and Fisher-Yates, written independently of the C++ code. Run from
the repo root to regenerate tests/data/golden_transform_spec.json.
"""

import hashlib
import hmac
import json
import struct
import sys

MASK = 0xFFFFFFFF
NONCES = {"permute": b"PERMUTE\0", "rotflip": b"ROTFLIP\0", "negpos": b"NEGPOS\0\0", "color": b"COLOR\0\0\0"}


def _rotl(v, c):
    return ((v << c) & MASK) | (v >> (32 - c))


def _quarter(s, a, b, c, d):
    s[a] = (s[a] + s[b]) & MASK; s[d] = _rotl(s[d] ^ s[a], 16)
    s[c] = (s[c] + s[d]) & MASK; s[b] = _rotl(s[b] ^ s[c], 12)
    s[a] = (s[a] + s[b]) & MASK; s[d] = _rotl(s[d] ^ s[a], 8)
    s[c] = (s[c] + s[d]) & MASK; s[b] = _rotl(s[b] ^ s[c], 7)


def chacha20_block(key, nonce, counter):
    state = list(struct.unpack("<4I", b"expand 32-byte k")) + list(struct.unpack("<8I", key))
    state += [counter & MASK, counter >> 32] + list(struct.unpack("<2I", nonce))
    w = state[:]
    for _ in range(10):
        _quarter(w, 0, 4, 8, 12); _quarter(w, 1, 5, 9, 13); _quarter(w, 2, 6, 10, 14); _quarter(w, 3, 7, 11, 15)
        _quarter(w, 0, 5, 10, 15); _quarter(w, 1, 6, 11, 12); _quarter(w, 2, 7, 8, 13); _quarter(w, 3, 4, 9, 14)
    return struct.pack("<16I", *[(a + b) & MASK for a, b in zip(w, state)])


class Stream:
    def __init__(self, key, purpose):
        self.key, self.nonce, self.counter, self.buf = key, NONCES[purpose], 0, b""

    def word(self):
        if not self.buf:
            self.buf = chacha20_block(self.key, self.nonce, self.counter)
            self.counter += 1
        w, self.buf = struct.unpack("<I", self.buf[:4])[0], self.buf[4:]
        return w

    def uniform(self, bound):
        floor = (2**32 - bound) % bound
        while True:
            x = self.word()
            if x >= floor:
                return x % bound


def subkeys(master, scheme):
    return [hmac.new(master, b"scramble/subkey/v1\0" + scheme.encode() + b"\0K%d" % i, hashlib.sha256).digest()
            for i in range(1, 5)]


def permutation(k1, n):
    s, p = Stream(k1, "permute"), list(range(n))
    for i in range(n - 1, 0, -1):
        j = s.uniform(i + 1)
        p[i], p[j] = p[j], p[i]
    return p


def draws(key, purpose, n, bound):
    s = Stream(key, purpose)
    return [s.uniform(bound) for _ in range(n)]


def spec(master, scheme, n):
    k = subkeys(master, scheme)
    out = {"scheme": scheme, "n": n, "subkeys": [x.hex() for x in k],
           "permutation": permutation(k[0], n), "d4_codes": draws(k[1], "rotflip", n, 8),
           "neg_flags": draws(k[2], "negpos", n, 2)}
    out["color_perms"] = draws(k[3], "color", n, 6) if scheme == "conventional" else None
    return out


def main():
    master = bytes(range(32))
    fixtures = {"master": master.hex(), "specs": [spec(master, "conventional", 12), spec(master, "grayscale", 12),
                                                 spec(master, "conventional", 300)]}
    # Raw stream words, long enough to cross the C++ refill boundary.
    s = Stream(master, "permute")
    fixtures["stream_words"] = {"key": master.hex(), "purpose": "permute", "words": [s.word() for _ in range(300)]}
    json.dump(fixtures, sys.stdout)
    sys.stdout.write("\n")


if __name__ == "__main__":
    if chacha20_block(bytes(32), bytes(8), 0)[:8].hex() != "76b8e0ada0f13d90":
        raise SystemExit("chacha20 self-check failed")
    main()
