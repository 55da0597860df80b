#!/usr/bin/env python3
"""Export torchvision's pretrained VGG19 (through conv4_1) to an MCCW1 container.

Usage:
    python3 tools/export_vgg19.py --out vgg19_enc.mccw

Requires torch + torchvision and network access (or a populated torch hub
cache) to download the pretrained weights. The output file is what the
trainer's `encoder_path` and `mccw info` expect.
"""

import argparse
import struct

import torch
from torchvision.models import vgg19

# (tag, index into vgg19().features) for conv1_1 .. conv4_1
LAYERS = [
    ("conv1_1", 0),
    ("conv1_2", 2),
    ("conv2_1", 5),
    ("conv2_2", 7),
    ("conv3_1", 10),
    ("conv3_2", 12),
    ("conv3_3", 14),
    ("conv3_4", 16),
    ("conv4_1", 19),
]

DTYPE_F32 = 0


def write_entry(out, tag: str, tensor: torch.Tensor) -> None:
    tensor = tensor.detach().contiguous().to(torch.float32)
    raw = tag.encode("utf-8")
    out.write(struct.pack("<I", len(raw)))
    out.write(raw)
    out.write(struct.pack("<BB", DTYPE_F32, tensor.dim()))
    for d in tensor.shape:
        out.write(struct.pack("<Q", d))
    out.write(tensor.numpy().tobytes())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output .mccw path")
    args = parser.parse_args()

    features = vgg19(weights="IMAGENET1K_V1").features

    entries = []
    for tag, idx in LAYERS:
        conv = features[idx]
        assert isinstance(conv, torch.nn.Conv2d), f"{tag}: expected Conv2d at index {idx}"
        entries.append((f"vgg.{tag}.weight", conv.weight))
        entries.append((f"vgg.{tag}.bias", conv.bias))

    # ImageNet preprocessing constants, stored with the weights so the
    # container is self-describing.
    entries.append(("vgg.mean", torch.tensor([0.485, 0.456, 0.406])))
    entries.append(("vgg.std", torch.tensor([0.229, 0.224, 0.225])))

    with open(args.out, "wb") as out:
        out.write(b"MCCW1")
        out.write(struct.pack("<I", len(entries)))
        for tag, tensor in entries:
            write_entry(out, tag, tensor)

    print(f"wrote {len(entries)} tensors to {args.out}")


if __name__ == "__main__":
    main()
