"""Attention cores: full scaled dot-product, query-sparse, and the
delay-aggregation variant used by the decomposition architecture.

All cores operate on (B, H, L, E) tensors; AttentionLayer handles the
projections and head reshaping.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from ..errors import BadHyperparameters


class FullAttention(nn.Module):
    def __init__(self, mask_flag: bool = False, dropout: float = 0.1):
        super().__init__()
        self.mask_flag = mask_flag
        self.dropout = nn.Dropout(dropout)

    def forward(self, q, k, v):
        # q: (B, H, Lq, E), k/v: (B, H, Lk, E)
        scale = 1.0 / math.sqrt(q.shape[-1])
        scores = torch.matmul(q, k.transpose(-2, -1)) * scale
        if self.mask_flag:
            Lq, Lk = q.shape[-2], k.shape[-2]
            mask = torch.triu(
                torch.ones(Lq, Lk, dtype=torch.bool, device=q.device), diagonal=1
            )
            scores = scores.masked_fill(mask, float("-inf"))
        attn = self.dropout(torch.softmax(scores, dim=-1))
        return torch.matmul(attn, v)


class ProbAttention(nn.Module):
    """Query-sparse attention: rank queries by a max-mean score measure on a
    random key subsample, give the top u = ceil(factor * ln Lq) queries exact
    attention over all keys, and the value mean to the rest.

    Unmasked only (used in the encoder). Key subsampling draws from a
    module-held generator while training and from a fixed-seed generator in
    eval mode, so eval forwards are bit-identical.
    """

    def __init__(self, factor: int = 5, dropout: float = 0.1, seed: int = 0):
        super().__init__()
        self.factor = factor
        self.dropout = nn.Dropout(dropout)
        self._train_gen = torch.Generator().manual_seed(seed)
        self._eval_seed = seed

    def _sample_index(self, L_Q: int, L_K: int, sample_k: int) -> torch.Tensor:
        gen = (
            self._train_gen
            if self.training
            else torch.Generator().manual_seed(self._eval_seed)
        )
        return torch.randint(L_K, (L_Q, sample_k), generator=gen)

    def forward(self, q, k, v):
        B, H, L_Q, E = q.shape
        L_K = k.shape[-2]
        scale = 1.0 / math.sqrt(E)

        u = min(int(math.ceil(self.factor * math.log(L_Q))), L_Q) if L_Q > 1 else 1
        sample_k = min(int(math.ceil(self.factor * math.log(L_K))), L_K) if L_K > 1 else 1

        if sample_k >= L_K:
            measure_scores = torch.matmul(q, k.transpose(-2, -1))
        else:
            idx = self._sample_index(L_Q, L_K, sample_k).to(q.device)
            # (B, H, Lq, sample_k, E) keys per query
            k_sample = k.unsqueeze(-3).expand(B, H, L_Q, L_K, E).gather(
                -2, idx.view(1, 1, L_Q, sample_k, 1).expand(B, H, L_Q, sample_k, E)
            )
            measure_scores = torch.matmul(q.unsqueeze(-2), k_sample.transpose(-2, -1)).squeeze(-2)
        sparsity = measure_scores.max(-1).values - measure_scores.mean(-1)
        top = sparsity.topk(u, dim=-1).indices  # (B, H, u)

        # Default context: mean of values for the pruned queries.
        context = v.mean(dim=-2, keepdim=True).expand(B, H, L_Q, E).clone()

        q_top = q.gather(-2, top.unsqueeze(-1).expand(B, H, u, E))
        scores = torch.matmul(q_top, k.transpose(-2, -1)) * scale
        attn = self.dropout(torch.softmax(scores, dim=-1))
        context.scatter_(
            -2, top.unsqueeze(-1).expand(B, H, u, E), torch.matmul(attn, v)
        )
        return context


class AutoCorrelation(nn.Module):
    """Delay aggregation: pick the top k = floor(factor * ln L) lags by
    FFT-estimated autocorrelation, roll the values by each lag, and blend
    the rolls with softmax weights. Lag selection is per sample, so batched
    and per-sample forwards agree.
    """

    def __init__(self, factor: int = 5, dropout: float = 0.1):
        super().__init__()
        self.factor = factor
        self.dropout = nn.Dropout(dropout)

    def forward(self, q, k, v):
        B, H, L, E = q.shape
        L_K = k.shape[-2]
        # Align key/value length to the query length: truncate or zero-pad.
        if L_K > L:
            k = k[..., :L, :]
            v = v[..., :L, :]
        elif L_K < L:
            pad = torch.zeros(B, H, L - L_K, E, dtype=q.dtype, device=q.device)
            k = torch.cat([k, pad], dim=-2)
            v = torch.cat([v, pad], dim=-2)

        q_fft = torch.fft.rfft(q.transpose(-2, -1), dim=-1)
        k_fft = torch.fft.rfft(k.transpose(-2, -1), dim=-1)
        corr = torch.fft.irfft(q_fft * torch.conj(k_fft), n=L, dim=-1)  # (B,H,E,L)

        top_k = max(1, min(int(self.factor * math.log(L)), L))
        mean_corr = corr.mean(dim=(1, 2))  # (B, L)
        weights_val, delays = mean_corr.topk(top_k, dim=-1)  # each (B, top_k)
        weights = torch.softmax(weights_val, dim=-1)

        v_t = v.transpose(-2, -1)              # (B, H, E, L)
        v_rep = torch.cat([v_t, v_t], dim=-1)  # avoids modular indexing per roll
        base = torch.arange(L, device=q.device).view(1, 1, 1, L)
        agg = torch.zeros_like(v_t)
        for i in range(top_k):
            shift = delays[:, i].view(B, 1, 1, 1)
            rolled = v_rep.expand(B, H, E, 2 * L).gather(
                -1, (base + shift).expand(B, H, E, L)
            )
            agg = agg + rolled * weights[:, i].view(B, 1, 1, 1)
        return self.dropout(agg.transpose(-2, -1))


class AttentionLayer(nn.Module):
    """Multi-head wrapper: q/k/v projections, core, output projection.

    With ``strict=True`` the token size must divide evenly into heads; with
    ``strict=False`` heads get floor(d/H) dims each and the output
    projection maps the (possibly narrower) concatenation back to d.
    """

    def __init__(self, core: nn.Module, d_model: int, n_heads: int,
                 strict: bool = True):
        super().__init__()
        if strict and d_model % n_heads != 0:
            raise BadHyperparameters(
                f"token size {d_model} not divisible by {n_heads} heads"
            )
        if d_model // n_heads < 1:
            raise BadHyperparameters(f"{n_heads} heads too many for size {d_model}")
        self.core = core
        self.n_heads = n_heads
        self.head_dim = d_model // n_heads
        inner = self.head_dim * n_heads
        self.q_proj = nn.Linear(d_model, inner)
        self.k_proj = nn.Linear(d_model, inner)
        self.v_proj = nn.Linear(d_model, inner)
        self.out_proj = nn.Linear(inner, d_model)

    def _split(self, t):
        B, L, _ = t.shape
        return t.view(B, L, self.n_heads, self.head_dim).transpose(1, 2)

    def forward(self, queries, keys, values):
        B, L_Q, _ = queries.shape
        out = self.core(
            self._split(self.q_proj(queries)),
            self._split(self.k_proj(keys)),
            self._split(self.v_proj(values)),
        )
        out = out.transpose(1, 2).reshape(B, L_Q, self.n_heads * self.head_dim)
        return self.out_proj(out)
