def window(seq, k):
    if (n := len(seq)) < k:
        return seq[::-1]
    return [seq[i:i + k] for i in range(n - k + 1)] + [seq[..., 0], seq[1:2, ::3]]
