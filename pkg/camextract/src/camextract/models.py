"""Classifier registry and input pipeline.

Each supported architecture carries the plumbing the attribution code
needs: where to hook (the default target layer), how to reshape the
captured tensor into a channel plane stack, which axis indexes channels
in the raw capture, and how to swap/read the classification head.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import torch
import torch.nn as nn
from PIL import Image
from torchvision import models as tv
from torchvision.transforms import functional as TF

from .errors import ConfigError

INPUT_SIZE = 224
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class ModelSpec:
    """Hook-up points for one architecture."""

    name: str
    builder: Callable[[], nn.Module]
    target: Callable[[nn.Module], nn.Module]
    to_spatial: Callable[[torch.Tensor], torch.Tensor]
    channel_dim: int
    head: Callable[[nn.Module], nn.Linear]
    set_head: Callable[[nn.Module, int], None]
    relu_based: bool


def _identity_spatial(t: torch.Tensor) -> torch.Tensor:
    return t


def _tokens_to_spatial(t: torch.Tensor) -> torch.Tensor:
    # (B, 1 + h*w, C) token sequence with a leading class token
    b, seq, c = t.shape
    side = int(round((seq - 1) ** 0.5))
    if side * side != seq - 1:
        raise ConfigError(f"token sequence of length {seq} has no square spatial grid")
    return t[:, 1:, :].reshape(b, side, side, c).permute(0, 3, 1, 2)


def _bhwc_to_spatial(t: torch.Tensor) -> torch.Tensor:
    return t.permute(0, 3, 1, 2)


def _last_maxpool(model: nn.Module) -> nn.Module:
    pools = [m for m in model.features if isinstance(m, nn.MaxPool2d)]
    return pools[-1]


def _last_swin_norm(model: nn.Module) -> nn.Module:
    blocks = [m for m in model.modules() if type(m).__name__ == "SwinTransformerBlock"]
    return blocks[-1].norm1


def _set_resnet_head(model: nn.Module, n: int) -> None:
    model.fc = nn.Linear(model.fc.in_features, n)


def _set_vgg_head(model: nn.Module, n: int) -> None:
    model.classifier[-1] = nn.Linear(model.classifier[-1].in_features, n)


def _set_vit_head(model: nn.Module, n: int) -> None:
    model.heads.head = nn.Linear(model.heads.head.in_features, n)


def _set_swin_head(model: nn.Module, n: int) -> None:
    model.head = nn.Linear(model.head.in_features, n)


MODELS = {
    "resnet50": ModelSpec(
        name="resnet50",
        builder=lambda: tv.resnet50(weights=None),
        target=lambda m: m.layer4[-1],
        to_spatial=_identity_spatial,
        channel_dim=1,
        head=lambda m: m.fc,
        set_head=_set_resnet_head,
        relu_based=True,
    ),
    "vgg16-bn": ModelSpec(
        name="vgg16-bn",
        builder=lambda: tv.vgg16_bn(weights=None),
        target=_last_maxpool,
        to_spatial=_identity_spatial,
        channel_dim=1,
        head=lambda m: m.classifier[-1],
        set_head=_set_vgg_head,
        relu_based=True,
    ),
    "vit-b32": ModelSpec(
        name="vit-b32",
        builder=lambda: tv.vit_b_32(weights=None),
        target=lambda m: m.encoder.layers[-1].ln_1,
        to_spatial=_tokens_to_spatial,
        channel_dim=2,
        head=lambda m: m.heads.head,
        set_head=_set_vit_head,
        relu_based=False,
    ),
    "swin-t": ModelSpec(
        name="swin-t",
        builder=lambda: tv.swin_t(weights=None),
        target=_last_swin_norm,
        to_spatial=_bhwc_to_spatial,
        channel_dim=3,
        head=lambda m: m.head,
        set_head=_set_swin_head,
        relu_based=False,
    ),
}


def build_model(
    name: str,
    num_classes: int | None = None,
    weights: str | Path | None = None,
    device: str = "cpu",
) -> tuple[nn.Module, ModelSpec]:
    """Construct a registered classifier in eval mode.

    ``num_classes`` resizes the classification head before any weights
    load, so checkpoints trained against a resized head restore cleanly.
    Without ``weights`` the network keeps its random initialization.
    """
    spec = MODELS.get(name)
    if spec is None:
        raise ConfigError(f"unknown model {name!r}; known: {', '.join(sorted(MODELS))}")
    model = spec.builder()
    if num_classes is not None:
        if num_classes < 1:
            raise ConfigError(f"num_classes must be positive, got {num_classes}")
        spec.set_head(model, num_classes)
    if weights is not None:
        path = Path(weights)
        if not path.is_file():
            raise ConfigError(f"weights file {path} does not exist")
        state = torch.load(path, map_location="cpu")
        try:
            model.load_state_dict(state)
        except RuntimeError as exc:
            raise ConfigError(f"weights {path} do not match {name}: {exc}") from exc
    model.to(device)
    model.eval()
    return model, spec


def resolve_target(model: nn.Module, spec: ModelSpec, selector: str | None) -> tuple[nn.Module, str]:
    """Pick the layer to attribute against and report its dotted name.

    ``selector`` overrides the architecture default with any dotted path
    from ``named_modules``, e.g. ``layer3.5`` on a residual network.
    """
    if selector is not None:
        table = dict(model.named_modules())
        if selector not in table:
            raise ConfigError(f"target layer {selector!r} not found in {spec.name}")
        return table[selector], selector
    module = spec.target(model)
    for name, candidate in model.named_modules():
        if candidate is module:
            return module, name
    return module, "<unnamed>"


def preprocess(image: Image.Image) -> torch.Tensor:
    """PIL image to a normalized (3, 224, 224) tensor.

    Non-square inputs are center cropped to their short side first, then
    resized, so aspect ratio never distorts the content.
    """
    img = image.convert("RGB")
    side = min(img.size)
    img = TF.center_crop(img, [side, side])
    img = TF.resize(img, [INPUT_SIZE, INPUT_SIZE], antialias=True)
    tensor = TF.to_tensor(img)
    return TF.normalize(tensor, IMAGENET_MEAN, IMAGENET_STD)


def load_image(path: str | Path) -> torch.Tensor:
    with Image.open(path) as img:
        return preprocess(img)
