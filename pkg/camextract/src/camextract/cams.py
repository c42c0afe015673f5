"""Attribution methods over a hooked target layer.

The gradient family (Grad-CAM, Grad-CAM++, XGrad-CAM, Layer-CAM) shares
one capture pass: a forward hook grabs the target activation, a backward
pass from the class logit grabs its gradient, and a per-method formula
reduces the (C, h, w) pair to a single plane. Ablation-CAM replaces the
gradient with score drops measured by zeroing one channel at a time,
which costs one forward pass per channel chunk. Guided backprop works on
the input instead of the target layer and keeps signed values.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn

from .errors import UnsupportedCombination

METHODS = (
    "grad-cam",
    "grad-cam++",
    "layer-cam",
    "xgrad-cam",
    "ablation-cam",
    "guided-backprop",
)

_EPS = 1e-8


class _Capture:
    """Holds the target layer's activation and its upstream gradient."""

    def __init__(self, module: nn.Module):
        self.activation: torch.Tensor | None = None
        self.gradient: torch.Tensor | None = None
        self._handle = module.register_forward_hook(self._on_forward)

    def _on_forward(self, module, inputs, output):
        # snapshot the values now: a later in-place op downstream would
        # otherwise rewrite the captured tensor under us
        self.activation = output.detach().clone()
        if output.requires_grad:
            output.register_hook(self._on_grad)

    def _on_grad(self, grad):
        self.gradient = grad

    def close(self):
        self._handle.remove()


def _grad_cam(a: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
    weights = g.mean(dim=(1, 2))
    return torch.relu((weights[:, None, None] * a).sum(dim=0))


def _grad_cam_pp(a: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
    g2 = g * g
    g3 = g2 * g
    denom = 2.0 * g2 + a.sum(dim=(1, 2), keepdim=True) * g3
    alpha = torch.where(denom.abs() > _EPS, g2 / denom, torch.zeros_like(g2))
    weights = (alpha * torch.relu(g)).sum(dim=(1, 2))
    return torch.relu((weights[:, None, None] * a).sum(dim=0))


def _xgrad_cam(a: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
    weights = (g * a).sum(dim=(1, 2)) / (a.sum(dim=(1, 2)) + _EPS)
    return torch.relu((weights[:, None, None] * a).sum(dim=0))


def _layer_cam(a: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
    return torch.relu((torch.relu(g) * a).sum(dim=0))


_GRADIENT_FORMULAS = {
    "grad-cam": _grad_cam,
    "grad-cam++": _grad_cam_pp,
    "xgrad-cam": _xgrad_cam,
    "layer-cam": _layer_cam,
}


def _forward_score(model: nn.Module, x: torch.Tensor, class_id: int) -> torch.Tensor:
    logits = model(x)
    if class_id < 0 or class_id >= logits.shape[-1]:
        raise UnsupportedCombination(
            f"class id {class_id} outside the model's {logits.shape[-1]} outputs"
        )
    return logits[0, class_id]


def _gradient_attribution(model, x, class_id, method, target, to_spatial):
    cap = _Capture(target)
    try:
        with torch.enable_grad():
            score = _forward_score(model, x, class_id)
            model.zero_grad(set_to_none=True)
            score.backward()
    finally:
        cap.close()
    if cap.activation is None:
        raise UnsupportedCombination("target layer never ran during the forward pass")
    if cap.gradient is None:
        raise UnsupportedCombination("no gradient reached the target layer")
    a = to_spatial(cap.activation.detach())[0]
    g = to_spatial(cap.gradient)[0]
    cam = _GRADIENT_FORMULAS[method](a, g)
    return cam, float(score.detach())


def _ablation_scores(model, x, class_id, target, channel_dim, channels, chunk):
    """Class score after zeroing each target channel, one entry per channel."""
    scores = []
    for lo in range(0, channels, chunk):
        idx = list(range(lo, min(lo + chunk, channels)))
        n = len(idx)

        def zero_one_channel(module, inputs, output, idx=idx):
            out = output.clone()
            # sample j in this chunk loses channel idx[j]; the batch axis
            # is gone from the per-sample view, hence channel_dim - 1
            for j, c in enumerate(idx):
                out.select(0, j).select(channel_dim - 1, c).zero_()
            return out

        handle = target.register_forward_hook(zero_one_channel)
        try:
            with torch.no_grad():
                logits = model(x.expand(n, -1, -1, -1))
        finally:
            handle.remove()
        scores.append(logits[:, class_id])
    return torch.cat(scores)


def _ablation_attribution(model, x, class_id, target, to_spatial, channel_dim, chunk):
    cap = _Capture(target)
    try:
        with torch.no_grad():
            score = _forward_score(model, x, class_id)
    finally:
        cap.close()
    if cap.activation is None:
        raise UnsupportedCombination("target layer never ran during the forward pass")
    a = to_spatial(cap.activation.detach())[0]
    channels = a.shape[0]
    ablated = _ablation_scores(model, x, class_id, target, channel_dim, channels, chunk)
    weights = (score - ablated) / (score.abs() + _EPS)
    cam = torch.relu((weights[:, None, None] * a).sum(dim=0))
    return cam, float(score)


class _GuidedReLU(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        y = torch.clamp(x, min=0.0)
        ctx.save_for_backward(y)
        return y

    @staticmethod
    def backward(ctx, grad):
        (y,) = ctx.saved_tensors
        return torch.clamp(grad, min=0.0) * (y > 0)


class _GuidedReLUModule(nn.Module):
    def forward(self, x):
        return _GuidedReLU.apply(x)


def _swap_relus(root: nn.Module):
    swapped = []
    for module in root.modules():
        for name, child in list(module._modules.items()):
            if isinstance(child, nn.ReLU):
                module._modules[name] = _GuidedReLUModule()
                swapped.append((module, name, child))
    return swapped


def _guided_backprop(model, x, class_id, relu_based):
    if not relu_based:
        raise UnsupportedCombination("guided backprop needs a ReLU network")
    swapped = _swap_relus(model)
    if not swapped:
        raise UnsupportedCombination("guided backprop found no ReLU layers to rewire")
    leaf = x.clone().requires_grad_(True)
    try:
        with torch.enable_grad():
            score = _forward_score(model, leaf, class_id)
            model.zero_grad(set_to_none=True)
            score.backward()
    finally:
        for parent, name, original in swapped:
            parent._modules[name] = original
    if leaf.grad is None:
        raise UnsupportedCombination("no gradient reached the input")
    # collapse color channels by sum so sign survives
    cam = leaf.grad[0].sum(dim=0)
    return cam, float(score.detach())


def attribute(
    model: nn.Module,
    x: torch.Tensor,
    class_id: int,
    method: str,
    target: nn.Module,
    to_spatial=None,
    channel_dim: int = 1,
    relu_based: bool = True,
    ablation_chunk: int = 64,
) -> tuple[np.ndarray, float]:
    """Attribution plane for one image and class.

    ``x`` is a preprocessed (3, H, W) or (1, 3, H, W) tensor. Returns the
    raw 2d map as float32 (feature resolution for layer methods, input
    resolution for guided backprop) and the class logit that produced it.
    """
    if method not in METHODS:
        raise UnsupportedCombination(f"unknown method {method!r}; known: {', '.join(METHODS)}")
    if x.dim() == 3:
        x = x[None]
    if x.dim() != 4 or x.shape[0] != 1:
        raise UnsupportedCombination(f"expected one image, got input of shape {tuple(x.shape)}")
    if to_spatial is None:
        to_spatial = lambda t: t

    if method == "guided-backprop":
        cam, score = _guided_backprop(model, x, class_id, relu_based)
    elif method == "ablation-cam":
        cam, score = _ablation_attribution(
            model, x, class_id, target, to_spatial, channel_dim, ablation_chunk
        )
    else:
        cam, score = _gradient_attribution(model, x, class_id, method, target, to_spatial)

    out = cam.detach().cpu().numpy().astype(np.float32)
    if out.ndim != 2:
        raise UnsupportedCombination(f"attribution collapsed to shape {out.shape}, expected 2d")
    return out, score
