"""Detector architectures.

`Gcn` is the spatial-only baseline: two graph convolutions over the
provided site adjacency followed by fully connected layers, consuming only
the current time bin - it has no mechanism for temporal patterns.

`TemporalGraphNet` learns its own adjacency from node embeddings (no
structure is provided to it), interleaves gated dilated 1-D temporal
convolutions with two-step mix-hop graph propagation, and classifies each
node from the fused spatio-temporal representation.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn


def normalized_adjacency(adj: np.ndarray) -> torch.Tensor:
    """Symmetric normalization with self loops: D^-1/2 (A + I) D^-1/2."""
    a = torch.as_tensor(adj, dtype=torch.float32)
    a = a + torch.eye(a.shape[0])
    d = a.sum(dim=1)
    inv_sqrt = torch.where(d > 0, d.pow(-0.5), torch.zeros_like(d))
    return inv_sqrt[:, None] * a * inv_sqrt[None, :]


class Gcn(nn.Module):
    def __init__(self, adjacency: np.ndarray, in_channels: int, hidden: int = 32):
        super().__init__()
        self.register_buffer("a_hat", normalized_adjacency(adjacency))
        self.lin1 = nn.Linear(in_channels, hidden)
        self.lin2 = nn.Linear(hidden, hidden)
        self.head = nn.Sequential(nn.Linear(hidden, hidden), nn.ReLU(), nn.Linear(hidden, 1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (batch, nodes, channels, W) -> use the final bin only
        x = x[..., -1]
        h = torch.relu(self.a_hat @ self.lin1(x))
        h = torch.relu(self.a_hat @ self.lin2(h))
        return self.head(h).squeeze(-1)  # (batch, nodes) logits


class MixHop(nn.Module):
    """Two-step propagation over a (learned) adjacency with hop selection."""

    def __init__(self, channels: int, hops: int = 2):
        super().__init__()
        self.hops = hops
        self.select = nn.Linear(channels * (hops + 1), channels)

    def forward(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        # h: (batch, nodes, channels); adj row-normalized (nodes, nodes)
        out = [h]
        cur = h
        for _ in range(self.hops):
            cur = adj @ cur
            out.append(cur)
        return torch.relu(self.select(torch.cat(out, dim=-1)))


class GatedTemporalConv(nn.Module):
    """Dilated 1-D convolution over time with a tanh/sigmoid gate."""

    def __init__(self, in_channels: int, out_channels: int, dilation: int, kernel: int = 3):
        super().__init__()
        self.filter = nn.Conv2d(in_channels, out_channels, (1, kernel), dilation=(1, dilation))
        self.gate = nn.Conv2d(in_channels, out_channels, (1, kernel), dilation=(1, dilation))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (batch, channels, nodes, W)
        return torch.tanh(self.filter(x)) * torch.sigmoid(self.gate(x))


class TemporalGraphNet(nn.Module):
    def __init__(self, n_nodes: int, in_channels: int, hidden: int = 32,
                 embed_dim: int = 16, dilations: tuple[int, ...] = (1, 2)):
        super().__init__()
        self.embed_src = nn.Parameter(torch.randn(n_nodes, embed_dim) * 0.1)
        self.embed_dst = nn.Parameter(torch.randn(n_nodes, embed_dim) * 0.1)
        self.input_proj = nn.Conv2d(in_channels, hidden, (1, 1))
        self.temporal = nn.ModuleList(
            GatedTemporalConv(hidden, hidden, d) for d in dilations
        )
        self.spatial = nn.ModuleList(MixHop(hidden) for _ in dilations)
        self.head = nn.Sequential(nn.Linear(hidden, hidden), nn.ReLU(), nn.Linear(hidden, 1))

    def learned_adjacency(self) -> torch.Tensor:
        scores = torch.relu(self.embed_src @ self.embed_dst.T)
        scores = scores - torch.diag(torch.diag(scores))
        adj = torch.softmax(scores + torch.eye(scores.shape[0]) * 1e-3, dim=1)
        return adj

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (batch, nodes, channels, W); the label belongs to the final bin,
        # so the representation stays causal: spatial mixing and the class
        # head both read the last remaining time step
        adj = self.learned_adjacency()
        h = self.input_proj(x.permute(0, 2, 1, 3))  # (batch, hidden, nodes, W)
        for temporal, spatial in zip(self.temporal, self.spatial):
            h = temporal(h)
            mixed = spatial(h[..., -1].permute(0, 2, 1), adj)  # (batch, nodes, hidden)
            h = h + mixed.permute(0, 2, 1).unsqueeze(-1)
        rep = h[..., -1].permute(0, 2, 1)  # (batch, nodes, hidden)
        return self.head(rep).squeeze(-1)
