"""Embedding backends.

ToyEncoder is a deterministic stand-in for tests and dry runs: each input is
hashed and the hash seeds a Gaussian draw, so equal inputs give equal
vectors with no model weights or network involved. ClipEncoder wraps a
Hugging Face CLIP checkpoint; its imports happen at construction time so
the toy path works on machines without torch.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ModelLoadFailure

TOY_DIM = 512
DEFAULT_CLIP_MODEL = "openai/clip-vit-base-patch16"


class ToyEncoder:
    """Hash-seeded Gaussian features, one float32 vector per input."""

    name = "toy"

    def __init__(self, dim: int = TOY_DIM):
        self.dim = dim

    def _draw(self, tag: bytes, payload: bytes) -> np.ndarray:
        digest = hashlib.sha256(tag + payload).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        return rng.standard_normal(self.dim).astype(np.float32)

    def encode_texts(self, prompts: list[str]) -> np.ndarray:
        return np.stack([self._draw(b"text:", p.encode("utf-8")) for p in prompts])

    def encode_images(self, images: list) -> np.ndarray:
        rows = []
        for image in images:
            rgb = image.convert("RGB")
            payload = f"{rgb.size}".encode() + rgb.tobytes()
            rows.append(self._draw(b"image:", payload))
        return np.stack(rows)


class ClipEncoder:
    """CLIP text and image features through transformers."""

    name = "clip"

    def __init__(self, model_name: str = DEFAULT_CLIP_MODEL):
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise ModelLoadFailure(
                f"the clip encoder needs torch and transformers installed: {exc}"
            ) from exc
        try:
            self.model = CLIPModel.from_pretrained(model_name)
            self.processor = CLIPProcessor.from_pretrained(model_name)
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load {model_name}: {exc}") from exc
        self.torch = torch
        self.model.eval()

    def encode_texts(self, prompts: list[str]) -> np.ndarray:
        with self.torch.no_grad():
            inputs = self.processor(text=list(prompts), return_tensors="pt", padding=True)
            features = self.model.get_text_features(**inputs)
        return features.cpu().numpy().astype(np.float32)

    def encode_images(self, images: list) -> np.ndarray:
        with self.torch.no_grad():
            inputs = self.processor(
                images=[image.convert("RGB") for image in images], return_tensors="pt"
            )
            features = self.model.get_image_features(**inputs)
        return features.cpu().numpy().astype(np.float32)
